"""Human-alignment machinery.

Matched pairs are sampled per level for human review; the label store keeps
an append-only history with the latest label per sample live. Deviation
rates count one-sided disagreement only: every sampled pair is a
system-declared match, so a disagreement is a human non-match verdict.
The same one-sided rule drives judge selection and threshold calibration.
"""

import hashlib
import json
import logging
import random
import threading
import time
from dataclasses import dataclass, asdict
from pathlib import Path

from .errors import InputError, ProviderError
from .model import MatchLevel, normalize_argument
from .providers.base import PairContext, VERDICT_MATCH, VERDICT_NON_MATCH
from .scoring import DeviationProfile

log = logging.getLogger(__name__)

CATEGORIES = ("numerical", "temporal", "coreference", "other")

VERDICTS = (VERDICT_MATCH, VERDICT_NON_MATCH)


class InvalidLabel(InputError):
    """Label violates the verdict/category pairing rules."""


@dataclass(frozen=True)
class AlignmentSample:
    """One system-declared match pulled for human review, with full context."""

    sample_id: str
    dataset_id: str
    level: str          # EM | RM | CM
    doc_id: str
    role: str
    gold: str
    predicted: str
    document: str
    event_type: str
    evidence: object = None
    question: str | None = None


@dataclass(frozen=True)
class HumanLabel:
    sample_id: str
    verdict: str                 # match | non-match
    category: str | None = None  # required iff non-match
    annotator_id: str = ""
    timestamp: float = 0.0


def validate_label(verdict: str, category) -> None:
    if verdict not in VERDICTS:
        raise InvalidLabel(f"verdict must be one of {VERDICTS}, got {verdict!r}")
    if verdict == VERDICT_NON_MATCH:
        if category not in CATEGORIES:
            raise InvalidLabel(
                f"non-match labels need a category from {CATEGORIES}, got {category!r}")
    elif category not in (None, "", "none"):
        raise InvalidLabel(f"match labels take no category, got {category!r}")


def _sample_id(dataset_id, level, doc_id, role, predicted_index, gold_index) -> str:
    joined = "\x1f".join([dataset_id, level, doc_id, role,
                          str(predicted_index), str(gold_index)])
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()[:16]


def sample_for_alignment(ledgers, per_level_n: int, seed, dataset_id: str):
    """Draw a uniform sample of matched pairs per level, without replacement.

    Deterministic for a fixed (ledgers, per_level_n, seed). Levels with fewer
    matches than requested yield what they have; the returned shortfall map
    flags them.
    """
    pools = {level: [] for level in MatchLevel}
    for ledger in ledgers:
        slot = ledger.slot
        for pair in ledger.pairs:
            p = slot.predicted[pair.predicted_index]
            g = slot.gold[pair.gold_index]
            pools[pair.level].append(AlignmentSample(
                sample_id=_sample_id(dataset_id, pair.level.name, slot.doc_id,
                                     slot.role, pair.predicted_index, pair.gold_index),
                dataset_id=dataset_id,
                level=pair.level.name,
                doc_id=slot.doc_id,
                role=slot.role,
                gold=g.raw,
                predicted=p.raw,
                document=slot.context.text,
                event_type=slot.context.event_type,
                evidence=pair.evidence,
                question=slot.context.question,
            ))
    samples = []
    shortfall = {}
    for level in MatchLevel:
        pool = sorted(pools[level], key=lambda s: s.sample_id)
        take = min(per_level_n, len(pool))
        rng = random.Random(f"{seed}:{level.name}")
        chosen = rng.sample(pool, take) if pool else []
        samples.extend(sorted(chosen, key=lambda s: s.sample_id))
        shortfall[level.name] = per_level_n - take
        if take < per_level_n:
            log.warning("level %s has only %d matched pairs (wanted %d)",
                        level.name, take, per_level_n)
    return samples, shortfall


def write_samples(path, samples, meta: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(dict(meta, kind="alignment-samples"),
                            ensure_ascii=False, sort_keys=True) + "\n")
        for sample in samples:
            fh.write(json.dumps(asdict(sample), ensure_ascii=False, sort_keys=True) + "\n")


def load_samples(path):
    meta = None
    samples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if meta is None:
                meta = obj
                continue
            samples.append(AlignmentSample(**obj))
    if meta is None:
        raise InputError(f"{path}: empty samples file")
    return meta, samples


class LabelStore:
    """Append-only JSONL label history; the latest record per sample is live.

    Writes are serialized; concurrent annotators go through one writer.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._history = []
        self._lock = threading.Lock()
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._history.append(HumanLabel(**json.loads(line)))

    def add(self, sample_id: str, verdict: str, category=None,
            annotator_id: str = "", timestamp: float | None = None) -> HumanLabel:
        """Validate and persist a label.

        Re-posting an identical live label for the same (sample, annotator) is
        a no-op, so UI retries and refreshes never duplicate history.
        """
        validate_label(verdict, category)
        category = category if verdict == VERDICT_NON_MATCH else None
        with self._lock:
            current = self.live_for_annotator(sample_id, annotator_id)
            if current and (current.verdict, current.category) == (verdict, category):
                return current
            label = HumanLabel(sample_id=sample_id, verdict=verdict, category=category,
                               annotator_id=annotator_id,
                               timestamp=time.time() if timestamp is None else timestamp)
            self._history.append(label)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(asdict(label), ensure_ascii=False,
                                    sort_keys=True) + "\n")
        return label

    def history(self):
        return list(self._history)

    def live(self) -> dict:
        """sample_id -> latest label (the adjudicated view)."""
        return {label.sample_id: label for label in self._history}

    def live_for_annotator(self, sample_id: str, annotator_id: str):
        found = None
        for label in self._history:
            if label.sample_id == sample_id and label.annotator_id == annotator_id:
                found = label
        return found


def deviation_rates(samples, live_labels: dict, dataset_id=None) -> DeviationProfile:
    """Per-level deviation: human non-match verdicts over labeled samples.

    Unlabeled samples are not observations and are excluded from the
    denominator. A level with no labeled samples contributes 0 with a
    warning, so the aligned score does not discount it.
    """
    if dataset_id is not None:
        samples = [s for s in samples if s.dataset_id == dataset_id]
    else:
        ids = sorted({s.dataset_id for s in samples})
        dataset_id = ids[0] if len(ids) == 1 else "+".join(ids)
    rates, sizes = {}, {}
    for level in MatchLevel:
        labeled = [live_labels[s.sample_id] for s in samples
                   if s.level == level.name and s.sample_id in live_labels]
        n_o = len(labeled)
        n_d = sum(1 for label in labeled if label.verdict == VERDICT_NON_MATCH)
        if n_o == 0:
            log.warning("no labeled samples for level %s; deviation defaults to 0",
                        level.name)
        rates[level] = n_d / n_o if n_o else 0.0
        sizes[level] = n_o
    return DeviationProfile(
        dataset_id=dataset_id,
        e_em=rates[MatchLevel.EM], e_rm=rates[MatchLevel.RM], e_cm=rates[MatchLevel.CM],
        n_em=sizes[MatchLevel.EM], n_rm=sizes[MatchLevel.RM], n_cm=sizes[MatchLevel.CM],
    )


def alignment_percent(profile: DeviationProfile) -> float:
    """Overall agreement with humans: 100 * (1 - sum of level deviations)."""
    return 100.0 * (1.0 - sum(profile.rates()))


def disagreement_breakdown(samples, live_labels: dict) -> dict:
    """Non-match label counts per category per dataset, plus a totals row."""
    by_sample = {s.sample_id: s for s in samples}
    table = {}
    for sample_id, label in live_labels.items():
        if label.verdict != VERDICT_NON_MATCH or sample_id not in by_sample:
            continue
        dataset = by_sample[sample_id].dataset_id
        row = table.setdefault(dataset, {cat: 0 for cat in CATEGORIES})
        row[label.category] += 1
    totals = {cat: sum(row[cat] for row in table.values()) for cat in CATEGORIES}
    out = {dataset: table[dataset] for dataset in sorted(table)}
    out["total"] = totals
    return out


# --- judge selection and threshold calibration --------------------------------


@dataclass(frozen=True)
class JudgeDatasetPair:
    """One human-labeled argument pair used to score candidate judges."""

    pair_id: str
    dataset_id: str
    document: str
    event_type: str
    role: str
    gold: str
    predicted: str
    human_verdict: str  # match | non-match


def load_judge_dataset(path) -> list:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            pair = JudgeDatasetPair(**obj)
            if pair.human_verdict not in VERDICTS:
                raise InputError(f"{path}:{line_no}: bad human_verdict "
                                 f"{pair.human_verdict!r}")
            pairs.append(pair)
    if not pairs:
        raise InputError(f"{path}: judge dataset is empty")
    return pairs


def _judge_context(pair: JudgeDatasetPair) -> PairContext:
    return PairContext(
        doc_id=pair.pair_id, role=pair.role, document=pair.document,
        event_type=pair.event_type, gold=pair.gold, predicted=pair.predicted,
        gold_norm=normalize_argument(pair.gold),
        predicted_norm=normalize_argument(pair.predicted),
    )


def judge_agreement(judge, pairs) -> dict:
    """Agreement of one judge with the human labels, overall and per dataset.

    Unresolved verdicts count as disagreement. Pairs that error out are
    skipped and reported, never silently dropped.
    """
    agree, total = 0, 0
    per_dataset = {}
    skipped = []
    for pair in pairs:
        try:
            verdict = judge.judge_pair(_judge_context(pair))
        except ProviderError as exc:
            skipped.append((pair.pair_id, str(exc)))
            continue
        total += 1
        hit = verdict.verdict == pair.human_verdict
        agree += hit
        row = per_dataset.setdefault(pair.dataset_id, [0, 0])
        row[0] += hit
        row[1] += 1
    return {
        "judge": judge.name,
        "mode": judge.mode,
        "agreement_percent": 100.0 * agree / total if total else 0.0,
        "per_dataset": {ds: 100.0 * a / n for ds, (a, n) in sorted(per_dataset.items())},
        "n_pairs": total,
        "skipped": skipped,
    }


def calibrate_threshold(pairs, provider, thresholds) -> list:
    """Disagreement rates of similarity-threshold matching vs human labels.

    For each threshold: how many pairs the provider would match (similarity
    strictly above), the one-sided disagreement rate (matched but human said
    non-match, over all labeled pairs), and the two-sided disagreement rate.
    """
    scored = [(provider.similarity(normalize_argument(p.gold),
                                   normalize_argument(p.predicted)),
               p.human_verdict) for p in pairs]
    rows = []
    for threshold in thresholds:
        matches = [(sim, human) for sim, human in scored if sim > threshold]
        one_sided = sum(1 for _, human in matches if human == VERDICT_NON_MATCH)
        two_sided = one_sided + sum(1 for sim, human in scored
                                    if sim <= threshold and human == VERDICT_MATCH)
        rows.append({
            "threshold": threshold,
            "match_count": len(matches),
            "one_sided_disagreement_percent": 100.0 * one_sided / len(scored),
            "two_sided_disagreement_percent": 100.0 * two_sided / len(scored),
        })
    return rows
