"""End-to-end evaluation: load files, pair slots, cascade, aggregate, report.

Slots are independent and run on a thread pool; ledgers are assembled in slot
order so the run is deterministic regardless of scheduling. All artifacts of
a run land in one output directory: report.json / report.csv / report.txt
plus ledgers.jsonl, which the alignment workflow feeds on.
"""

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

from .cascade import MatchPair, SlotLedger, run_cascade
from .errors import InputError, ProviderFailure
from .ingestion import load_dataset, load_path, load_predictions
from .model import (
    Argument,
    EvaluationSlot,
    MatchLevel,
    NormalizationPolicy,
    SlotContext,
    pair_slots,
)
from .providers.base import LexicalSimilarity, ScriptedJudge
from .providers.cache import CacheStore
from .providers.prompts import PromptTemplate
from .providers.remote import RemoteEmbeddingSimilarity, RemoteJudge
from .reporting import EvaluationReport, canonical_json_bytes, emit_report
from .scoring import DeviationProfile, accumulate, macro_role_scores, score_set

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """One evaluation run's knobs; defaults mirror the framework's choices."""

    dataset_path: str
    predictions_path: str
    out_dir: str | None = None
    threshold: float = 0.85
    case_fold: bool = True
    collapse_whitespace: bool = True
    trim: bool = True
    similarity: dict = field(default_factory=lambda: {"kind": "lexical"})
    judge: dict = field(default_factory=dict)       # {"kind": "scripted"|"remote", ...}
    template_path: str | None = None
    cache_path: str | None = None
    deviation_path: str | None = None
    seed: int = 0
    per_level_sample_n: int = 150
    in_flight: int = 4
    keep_going: bool = False
    short_circuit: bool = False

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1.0:
            raise InputError(f"threshold must be in (0, 1], got {self.threshold}")

    def policy(self) -> NormalizationPolicy:
        return NormalizationPolicy(case_fold=self.case_fold,
                                   collapse_whitespace=self.collapse_whitespace,
                                   trim=self.trim)

    def provenance(self) -> dict:
        """Config fields that shape results; filesystem paths excluded."""
        return {
            "threshold": self.threshold,
            "case_fold": self.case_fold,
            "collapse_whitespace": self.collapse_whitespace,
            "trim": self.trim,
            "similarity": {k: v for k, v in self.similarity.items() if k != "script"},
            "judge": {k: v for k, v in self.judge.items() if k != "script"},
            "seed": self.seed,
            "per_level_sample_n": self.per_level_sample_n,
            "short_circuit": self.short_circuit,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.provenance(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]


def _load_template(path) -> PromptTemplate:
    body = Path(path).read_text(encoding="utf-8")
    return PromptTemplate(template_id=Path(path).stem, body=body)


def build_providers(config: RunConfig, cache: CacheStore):
    """Construct the similarity and judge backends named by the config."""
    sim_spec = dict(config.similarity)
    kind = sim_spec.get("kind", "lexical")
    if kind == "lexical":
        similarity = LexicalSimilarity()
    elif kind == "remote":
        similarity = RemoteEmbeddingSimilarity(
            endpoint=sim_spec["endpoint"], model=sim_spec["model"], cache=cache)
    else:
        raise InputError(f"unknown similarity kind: {kind!r}")

    judge_spec = dict(config.judge)
    kind = judge_spec.get("kind", "scripted")
    template = _load_template(config.template_path) if config.template_path else None
    if kind == "scripted":
        script_path = judge_spec.get("script")
        if script_path:
            judge = ScriptedJudge.from_file(
                script_path, cache=cache,
                **({"template": template} if template else {}))
        else:
            judge = ScriptedJudge({}, cache=cache)
    elif kind == "remote":
        judge = RemoteJudge(endpoint=judge_spec["endpoint"], model=judge_spec["model"],
                            mode=judge_spec.get("mode", "zero-shot"),
                            template=template, cache=cache,
                            structured=bool(judge_spec.get("structured", False)))
    else:
        raise InputError(f"unknown judge kind: {kind!r}")
    return similarity, judge


def load_deviation_profile(path) -> DeviationProfile:
    with open(path, encoding="utf-8") as fh:
        return DeviationProfile(**json.load(fh))


def evaluate(config: RunConfig, providers=None):
    """Run the full pipeline; returns (report, ledgers).

    providers optionally overrides the (similarity, judge) pair built from the
    config; tests use it to inject scripted or failing backends.
    """
    dataset_id, documents, stats = load_dataset(load_path(config.dataset_path))
    model_id, prompt_mode, predictions = load_predictions(
        load_path(config.predictions_path), documents)
    slots = pair_slots(documents, predictions, config.policy())

    if providers is None:
        cache = CacheStore(config.cache_path)
        similarity, judge = build_providers(config, cache)
    else:
        similarity, judge = providers
    profile = (load_deviation_profile(config.deviation_path)
               if config.deviation_path else DeviationProfile(dataset_id=dataset_id))

    ledgers = []
    failures = []

    def _one(slot):
        return run_cascade(slot, similarity, judge, threshold=config.threshold,
                           short_circuit=config.short_circuit)

    with ThreadPoolExecutor(max_workers=max(1, config.in_flight)) as pool:
        if config.keep_going:
            futures = [(slot, pool.submit(_one, slot)) for slot in slots]
            for slot, future in futures:
                try:
                    ledgers.append(future.result())
                except ProviderFailure as exc:
                    failures.append({"doc_id": slot.doc_id, "role": slot.role,
                                     "error": str(exc)})
                    log.warning("slot (%s, %s) failed: %s", slot.doc_id, slot.role, exc)
        else:
            ledgers = list(pool.map(_one, slots))

    counts = accumulate(ledgers)
    scores = score_set(counts, profile)
    meta = {
        "dataset_id": dataset_id,
        "model_id": model_id,
        "prompt_mode": prompt_mode,
        "config_hash": config.config_hash(),
        "providers": {"similarity": similarity.name, "judge": judge.name},
        "cache_stats": {"similarity": similarity.stats, "judge": judge.stats},
        "dataset_stats": asdict(stats),
    }
    diagnostics = {}
    if failures:
        diagnostics["failed_slots"] = failures
    if counts.unresolved_pairs:
        diagnostics["unresolved_pairs"] = counts.unresolved_pairs
    report = EvaluationReport(meta=meta, counts=counts, scores=scores,
                              profile=profile, diagnostics=diagnostics,
                              macro_by_role=macro_role_scores(ledgers, profile))
    return report, ledgers


# --- run artifacts -------------------------------------------------------------


def _ledger_to_obj(ledger: SlotLedger) -> dict:
    slot = ledger.slot
    return {
        "doc_id": slot.doc_id,
        "role": slot.role,
        "document": slot.context.text,
        "event_type": slot.context.event_type,
        "question": slot.context.question,
        "predicted": [a.raw for a in slot.predicted],
        "predicted_norm": [a.normalized for a in slot.predicted],
        "gold": [a.raw for a in slot.gold],
        "gold_norm": [a.normalized for a in slot.gold],
        "pairs": [{"level": p.level.name, "predicted_index": p.predicted_index,
                   "gold_index": p.gold_index, "evidence": p.evidence}
                  for p in ledger.pairs],
        "counts": {"np_e": ledger.np_e, "ng_e": ledger.ng_e, "np_r": ledger.np_r,
                   "ng_r": ledger.ng_r, "np_c": ledger.np_c, "ng_c": ledger.ng_c},
        "judge_calls": ledger.judge_calls,
        "baseline_judge_calls": ledger.baseline_judge_calls,
        "post_em_pair_count": ledger.post_em_pair_count,
        "unresolved": [list(pair) for pair in ledger.unresolved],
    }


def _ledger_from_obj(obj: dict) -> SlotLedger:
    slot = EvaluationSlot(
        doc_id=obj["doc_id"], role=obj["role"],
        gold=tuple(Argument(raw=r, normalized=n, slot_index=i)
                   for i, (r, n) in enumerate(zip(obj["gold"], obj["gold_norm"]))),
        predicted=tuple(Argument(raw=r, normalized=n, slot_index=i)
                        for i, (r, n) in enumerate(zip(obj["predicted"],
                                                       obj["predicted_norm"]))),
        context=SlotContext(text=obj["document"], event_type=obj["event_type"],
                            question=obj.get("question")),
    )
    pairs = tuple(MatchPair(level=MatchLevel[p["level"]],
                            predicted_index=p["predicted_index"],
                            gold_index=p["gold_index"], evidence=p.get("evidence"))
                  for p in obj["pairs"])
    c = obj["counts"]
    return SlotLedger(slot=slot, pairs=pairs, p_total=len(slot.predicted),
                      g_total=len(slot.gold), judge_calls=obj["judge_calls"],
                      baseline_judge_calls=obj["baseline_judge_calls"],
                      post_em_pair_count=obj["post_em_pair_count"],
                      unresolved=tuple(tuple(x) for x in obj.get("unresolved", [])),
                      **c)


def write_run(out_dir, report: EvaluationReport, ledgers, config: RunConfig) -> dict:
    """Write all artifacts of a run; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report_json": out / "report.json",
        "report_csv": out / "report.csv",
        "report_txt": out / "report.txt",
        "ledgers": out / "ledgers.jsonl",
        "run_config": out / "run_config.json",
    }
    paths["report_json"].write_bytes(emit_report(report, "structured"))
    paths["report_csv"].write_bytes(emit_report(report, "csv"))
    paths["report_txt"].write_bytes(emit_report(report, "table-text"))
    paths["run_config"].write_bytes(canonical_json_bytes(asdict(config)))
    with open(paths["ledgers"], "w", encoding="utf-8") as fh:
        header = {"kind": "ledgers", "dataset_id": report.meta["dataset_id"],
                  "model_id": report.meta["model_id"],
                  "prompt_mode": report.meta["prompt_mode"],
                  "config_hash": report.meta["config_hash"]}
        fh.write(json.dumps(header, ensure_ascii=False, sort_keys=True) + "\n")
        for ledger in ledgers:
            fh.write(json.dumps(_ledger_to_obj(ledger), ensure_ascii=False,
                                sort_keys=True) + "\n")
    return {name: str(path) for name, path in paths.items()}


def load_run_ledgers(path):
    """Read ledgers.jsonl back; returns (meta, ledgers)."""
    meta = None
    ledgers = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if meta is None:
                meta = obj
                continue
            ledgers.append(_ledger_from_obj(obj))
    if meta is None:
        raise InputError(f"{path}: empty ledgers file")
    return meta, ledgers


def refresh_report(report_path, ledgers, profile: DeviationProfile) -> EvaluationReport:
    """Re-emit a stored report with a measured deviation profile applied.

    Counts and scores (including the per-role macro view) are rebuilt from
    the ledgers; run provenance is kept from the original report.
    """
    with open(report_path, encoding="utf-8") as fh:
        report = EvaluationReport.from_dict(json.load(fh))
    counts = accumulate(ledgers)
    refreshed = EvaluationReport(meta=report.meta, counts=counts,
                                 scores=score_set(counts, profile), profile=profile,
                                 diagnostics=report.diagnostics,
                                 macro_by_role=macro_role_scores(ledgers, profile))
    Path(report_path).write_bytes(canonical_json_bytes(refreshed.to_dict()))
    return refreshed
