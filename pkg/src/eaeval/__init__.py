"""Cascaded matching evaluation for generative event argument extraction.

Predictions are scored at three matching levels (exact, relaxed, judge-based),
each consuming only what the previous level left unmatched, and a fourth,
judgment-aligned score discounts each level by its measured deviation from
human annotators.
"""

from .cascade import MatchPair, SlotLedger, run_cascade
from .model import (
    Argument,
    DocumentRecord,
    EvaluationSlot,
    MatchLevel,
    NormalizationPolicy,
    PredictionRecord,
    normalize_argument,
    pair_slots,
)
from .scoring import (
    CorpusCounts,
    DeviationProfile,
    LevelScore,
    ScoreSet,
    accumulate,
    inference_reduction,
    jam_scores,
    level_scores,
    reduction_percent,
    score_set,
)

__version__ = "0.1.0"

__all__ = [
    "Argument", "DocumentRecord", "EvaluationSlot", "MatchLevel",
    "NormalizationPolicy", "PredictionRecord", "normalize_argument", "pair_slots",
    "MatchPair", "SlotLedger", "run_cascade",
    "CorpusCounts", "DeviationProfile", "LevelScore", "ScoreSet", "accumulate",
    "inference_reduction", "jam_scores", "level_scores", "reduction_percent",
    "score_set", "__version__",
]
