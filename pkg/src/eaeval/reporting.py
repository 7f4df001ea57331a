"""Report assembly and rendering: structured JSON, CSV, and plain-text tables.

Scores are displayed x100 with 2 decimals; the structured format keeps the
raw fractions and everything needed to recompute them (counts, deviation
profile, provenance). Reduction percentages are truncated, not rounded, to
2 decimals, matching the convention of the accounting tables they mirror.
"""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

from .scoring import (
    CorpusCounts,
    DeviationProfile,
    LevelScore,
    ScoreSet,
    inference_reduction,
    score_set,
)

LEVEL_ORDER = ("em", "rm", "cm", "jam")


def canonical_json_bytes(obj) -> bytes:
    """Stable bytes for a JSON-serializable object; safe to diff and hash."""
    return (json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n").encode("utf-8")


def fmt_score(fraction: float) -> str:
    """Display convention for scores: x100, 2 decimals, standard rounding."""
    return f"{100.0 * fraction:.2f}"


def trunc_percent(pct: float) -> float:
    """Truncate a percentage to 2 decimals (accounting-table convention)."""
    return math.floor(pct * 100 + 1e-6) / 100


def gain_rows(em_f1: float, level_f1: float):
    """Delta and relative gain of one level's F1 over exact match, in points.

    Gain is undefined when the baseline F1 is 0; callers render that as a dash.
    """
    delta = level_f1 - em_f1
    gain = 100.0 * delta / em_f1 if em_f1 > 0 else None
    return delta, gain


@dataclass(frozen=True)
class EvaluationReport:
    """Everything one evaluation run produced, self-contained and recomputable."""

    meta: dict                     # dataset_id, model_id, prompt_mode, config_hash, providers, cache stats
    counts: CorpusCounts
    scores: ScoreSet
    profile: DeviationProfile
    diagnostics: dict = field(default_factory=dict)
    macro_by_role: dict = field(default_factory=dict)  # non-standard macro view

    def inference(self):
        return inference_reduction(self.counts)

    def gains(self):
        em_points = 100.0 * self.scores.em.f1
        rows = []
        for name in ("rm", "cm", "jam"):
            delta, gain = gain_rows(em_points, 100.0 * getattr(self.scores, name).f1)
            rows.append({"level": name.upper(), "delta_f1": delta, "gain_percent": gain})
        return rows

    def to_dict(self) -> dict:
        baseline, actual, pct = self.inference()
        return {
            "meta": dict(self.meta),
            "counts": asdict(self.counts),
            "deviation_profile": asdict(self.profile),
            "scores": {name: asdict(getattr(self.scores, name)) for name in LEVEL_ORDER},
            "inference": {"baseline_judge_calls": baseline, "judge_calls": actual,
                          "reduction_percent": pct},
            "gains": self.gains(),
            "diagnostics": dict(self.diagnostics),
            "macro_by_role": {role: {name: asdict(getattr(scores, name))
                                     for name in LEVEL_ORDER}
                              for role, scores in sorted(self.macro_by_role.items())},
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "EvaluationReport":
        scores = ScoreSet(**{name: LevelScore(**obj["scores"][name]) for name in LEVEL_ORDER})
        macro = {role: ScoreSet(**{name: LevelScore(**entry[name]) for name in LEVEL_ORDER})
                 for role, entry in obj.get("macro_by_role", {}).items()}
        return cls(meta=obj["meta"], counts=CorpusCounts(**obj["counts"]),
                   scores=scores, profile=DeviationProfile(**obj["deviation_profile"]),
                   diagnostics=obj.get("diagnostics", {}), macro_by_role=macro)


def verify_report(report: EvaluationReport) -> bool:
    """Self-consistency: displayed scores re-derive from the embedded counts."""
    recomputed = score_set(report.counts, report.profile)
    for name in LEVEL_ORDER:
        shown = getattr(report.scores, name)
        fresh = getattr(recomputed, name)
        for metric in ("precision", "recall", "f1"):
            if fmt_score(getattr(shown, metric)) != fmt_score(getattr(fresh, metric)):
                return False
    return True


def _csv_bytes(report: EvaluationReport) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["level", "precision", "recall", "f1"])
    for name in LEVEL_ORDER:
        row = getattr(report.scores, name)
        writer.writerow([name.upper(), fmt_score(row.precision),
                         fmt_score(row.recall), fmt_score(row.f1)])
    return out.getvalue().encode("utf-8")


def _table_bytes(report: EvaluationReport) -> bytes:
    lines = []
    meta = report.meta
    lines.append(f"dataset: {meta.get('dataset_id', '?')}   "
                 f"model: {meta.get('model_id', '?')} ({meta.get('prompt_mode', '?')})")
    lines.append(f"config hash: {meta.get('config_hash', '?')}")
    lines.append("")
    lines.append(f"{'level':<6} {'precision':>10} {'recall':>10} {'f1':>10}")
    for name in LEVEL_ORDER:
        row = getattr(report.scores, name)
        lines.append(f"{name.upper():<6} {fmt_score(row.precision):>10} "
                     f"{fmt_score(row.recall):>10} {fmt_score(row.f1):>10}")
    lines.append("")
    lines.append(f"{'level':<6} {'delta F1':>10} {'gain %':>10}")
    for row in report.gains():
        gain = "—" if row["gain_percent"] is None else f"{row['gain_percent']:+.2f}"
        lines.append(f"{row['level']:<6} {row['delta_f1']:+10.2f} {gain:>10}")
    baseline, actual, pct = report.inference()
    lines.append("")
    lines.append(f"judge calls: {actual} of {baseline} judge-only baseline "
                 f"(reduction {trunc_percent(pct):.2f}%)")
    profile = report.profile
    lines.append(f"deviation profile [{profile.dataset_id or 'default'}]: "
                 f"EM {profile.e_em:.4f} (n={profile.n_em})  "
                 f"RM {profile.e_rm:.4f} (n={profile.n_rm})  "
                 f"CM {profile.e_cm:.4f} (n={profile.n_cm})")
    if report.counts.unresolved_pairs:
        lines.append(f"unresolved judge pairs: {report.counts.unresolved_pairs} "
                     "(counted as non-match)")
    for key, value in sorted(report.diagnostics.items()):
        lines.append(f"{key}: {value}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def emit_report(report: EvaluationReport, fmt: str = "structured") -> bytes:
    """Render a report; bytes are deterministic for a fixed report."""
    if fmt == "structured":
        return canonical_json_bytes(report.to_dict())
    if fmt == "csv":
        return _csv_bytes(report)
    if fmt == "table-text":
        return _table_bytes(report)
    raise ValueError(f"unknown report format: {fmt!r}")
