"""Corpus aggregation and score computation for all four levels.

Counts are micro-aggregated (summed over slots, then divided by the global
|P| and |G|), levels are cumulative (each level's score includes every level
below it), and the judgment-aligned score discounts each level's counts by
its measured deviation from human judgment. All math runs on unrounded
counts; rounding is a display concern.
"""

from dataclasses import dataclass

from .errors import InvalidDeviation
from .model import MatchLevel


@dataclass(frozen=True)
class CorpusCounts:
    """Fieldwise sums of slot ledgers across an evaluation run."""

    np_e: int = 0
    ng_e: int = 0
    np_r: int = 0
    ng_r: int = 0
    np_c: int = 0
    ng_c: int = 0
    p_total: int = 0
    g_total: int = 0
    judge_calls: int = 0
    baseline_judge_calls: int = 0
    post_em_pair_count: int = 0
    n_slots: int = 0
    unresolved_pairs: int = 0


def accumulate(ledgers) -> CorpusCounts:
    """Sum ledger fields; order-independent."""
    c = CorpusCounts()
    fields = ("np_e", "ng_e", "np_r", "ng_r", "np_c", "ng_c", "p_total",
              "g_total", "judge_calls", "baseline_judge_calls",
              "post_em_pair_count")
    totals = {name: 0 for name in fields}
    n_slots = 0
    unresolved = 0
    for ledger in ledgers:
        for name in fields:
            totals[name] += getattr(ledger, name)
        n_slots += 1
        unresolved += len(ledger.unresolved)
    return CorpusCounts(n_slots=n_slots, unresolved_pairs=unresolved, **totals)


@dataclass(frozen=True)
class LevelScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ScoreSet:
    """Precision/recall/F1 at the three cascade levels plus the aligned score."""

    em: LevelScore
    rm: LevelScore
    cm: LevelScore
    jam: LevelScore


@dataclass(frozen=True)
class DeviationProfile:
    """Per-level human-deviation rates for one dataset; all zero by default."""

    dataset_id: str = ""
    e_em: float = 0.0
    e_rm: float = 0.0
    e_cm: float = 0.0
    n_em: int = 0
    n_rm: int = 0
    n_cm: int = 0

    def rates(self):
        return (self.e_em, self.e_rm, self.e_cm)

    def validate(self):
        for level, rate in zip(MatchLevel, self.rates()):
            if not 0.0 <= rate <= 1.0:
                raise InvalidDeviation(f"deviation for {level.name} is {rate}, not in [0, 1]")


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _ratio(numerator, denominator):
    return numerator / denominator if denominator else 0.0


def level_scores(c: CorpusCounts, level: MatchLevel):
    """Cumulative precision, recall, F1 at one cascade level."""
    np_parts = (c.np_e, c.np_r, c.np_c)
    ng_parts = (c.ng_e, c.ng_r, c.ng_c)
    p = _ratio(sum(np_parts[:level]), c.p_total)
    r = _ratio(sum(ng_parts[:level]), c.g_total)
    return p, r, f1_score(p, r)


def jam_scores(c: CorpusCounts, profile: DeviationProfile):
    """Judgment-aligned precision, recall, F1.

    Each level's counts are weighted by (1 - deviation rate); with an all-zero
    profile this equals the level-3 scores.
    """
    profile.validate()
    weights = [1.0 - e for e in profile.rates()]
    p = _ratio(weights[0] * c.np_e + weights[1] * c.np_r + weights[2] * c.np_c,
               c.p_total)
    r = _ratio(weights[0] * c.ng_e + weights[1] * c.ng_r + weights[2] * c.ng_c,
               c.g_total)
    return p, r, f1_score(p, r)


def score_set(c: CorpusCounts, profile: DeviationProfile | None = None) -> ScoreSet:
    profile = profile or DeviationProfile()
    return ScoreSet(
        em=LevelScore(*level_scores(c, MatchLevel.EM)),
        rm=LevelScore(*level_scores(c, MatchLevel.RM)),
        cm=LevelScore(*level_scores(c, MatchLevel.CM)),
        jam=LevelScore(*jam_scores(c, profile)),
    )


def inference_reduction(c: CorpusCounts):
    """(baseline, actual, reduction percent) for judge-call accounting.

    Baseline is the judge-only comparison base (every predicted x gold pair);
    actual is the judge calls the cascade still needed.
    """
    baseline = c.baseline_judge_calls
    actual = c.judge_calls
    return baseline, actual, reduction_percent(baseline, actual)


def reduction_percent(baseline: float, actual: float) -> float:
    if baseline == 0:
        return 0.0
    return 100.0 * (baseline - actual) / baseline


def macro_role_scores(ledgers, profile: DeviationProfile | None = None) -> dict:
    """Per-role score sets (macro view; non-standard, for diagnostics only)."""
    by_role = {}
    for ledger in ledgers:
        by_role.setdefault(ledger.slot.role, []).append(ledger)
    return {role: score_set(accumulate(group), profile)
            for role, group in sorted(by_role.items())}
