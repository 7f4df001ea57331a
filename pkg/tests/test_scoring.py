import random

import pytest

from eaeval.cascade import run_cascade
from eaeval.errors import InvalidDeviation
from eaeval.model import MatchLevel
from eaeval.providers.base import ScriptedJudge, ScriptedSimilarity
from eaeval.scoring import (
    CorpusCounts,
    DeviationProfile,
    accumulate,
    f1_score,
    inference_reduction,
    jam_scores,
    level_scores,
    macro_role_scores,
    reduction_percent,
    score_set,
)
from eaeval.reporting import trunc_percent

from conftest import make_slot
from reference import random_case


def _random_ledgers(seed, n=20):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        predicted, gold, sim_table, judge_table = random_case(rng)
        slot = make_slot(predicted, gold, doc_id=f"d{i}", role=rng.choice("abc"))
        out.append(run_cascade(slot, ScriptedSimilarity(sim_table),
                               ScriptedJudge(judge_table)))
    return out


def test_accumulate_empty():
    c = accumulate([])
    assert c == CorpusCounts()


def test_accumulate_doubles():
    ledgers = _random_ledgers(seed=1, n=5)
    once = accumulate(ledgers)
    twice = accumulate(ledgers + ledgers)
    assert twice.np_e == 2 * once.np_e
    assert twice.p_total == 2 * once.p_total
    assert twice.judge_calls == 2 * once.judge_calls


def test_accumulate_order_independent():
    ledgers = _random_ledgers(seed=2, n=10)
    shuffled = list(ledgers)
    random.Random(3).shuffle(shuffled)
    assert accumulate(ledgers) == accumulate(shuffled)


def test_level_scores_perfect_em():
    c = CorpusCounts(np_e=1, ng_e=1, p_total=1, g_total=1)
    assert level_scores(c, MatchLevel.EM) == (1.0, 1.0, 1.0)


def test_level_scores_published_f1_recomputes():
    # a published row: EM precision 14.14, recall 20.76, F1 16.82
    p, r = 0.1414, 0.2076
    assert round(100 * f1_score(p, r), 2) == pytest.approx(16.82, abs=0.02)


def test_level_scores_zero_denominators():
    c = CorpusCounts(p_total=0, g_total=5)
    assert level_scores(c, MatchLevel.CM) == (0.0, 0.0, 0.0)


def _counts_from_cumulative(precisions, recalls, scale=10000):
    """Turn cumulative percent scores into integer count fixtures."""
    np_parts = [round(scale * p / 100) for p in precisions]
    ng_parts = [round(scale * r / 100) for r in recalls]
    return CorpusCounts(
        np_e=np_parts[0], np_r=np_parts[1] - np_parts[0], np_c=np_parts[2] - np_parts[1],
        ng_e=ng_parts[0], ng_r=ng_parts[1] - ng_parts[0], ng_c=ng_parts[2] - ng_parts[1],
        p_total=scale, g_total=scale,
    )


def test_jam_zero_deviation_equals_cm():
    c = _counts_from_cumulative([14.14, 19.40, 43.99], [20.76, 28.49, 57.57])
    assert jam_scores(c, DeviationProfile()) == level_scores(c, MatchLevel.CM)


def test_jam_discounts_by_deviation():
    c = _counts_from_cumulative([14.14, 19.40, 43.99], [20.76, 28.49, 57.57])
    profile = DeviationProfile(e_em=0.0, e_rm=0.0267, e_cm=0.1333)
    p, r, f1 = jam_scores(c, profile)
    assert 100 * p == pytest.approx(40.58, abs=0.05)
    assert 100 * r == pytest.approx(53.50, abs=0.05)
    assert 100 * f1 == pytest.approx(46.16, abs=0.05)


def test_jam_rejects_bad_deviation():
    c = CorpusCounts(np_e=1, ng_e=1, p_total=1, g_total=1)
    with pytest.raises(InvalidDeviation):
        jam_scores(c, DeviationProfile(e_cm=1.2))
    with pytest.raises(InvalidDeviation):
        jam_scores(c, DeviationProfile(e_rm=-0.1))


def test_inference_reduction_rows():
    c = CorpusCounts(baseline_judge_calls=12206, judge_calls=4436)
    baseline, actual, pct = inference_reduction(c)
    assert (baseline, actual) == (12206, 4436)
    assert trunc_percent(pct) == 63.65
    c = CorpusCounts(baseline_judge_calls=3562, judge_calls=2387)
    assert trunc_percent(inference_reduction(c)[2]) == 32.98


def test_inference_reduction_degenerate():
    assert reduction_percent(0, 0) == 0.0
    assert reduction_percent(10, 10) == 0.0


def test_cumulative_monotonicity_and_jam_bounds():
    rng = random.Random(41)
    for seed in range(30):
        ledgers = _random_ledgers(seed=seed, n=8)
        c = accumulate(ledgers)
        em = level_scores(c, MatchLevel.EM)
        rm = level_scores(c, MatchLevel.RM)
        cm = level_scores(c, MatchLevel.CM)
        assert em[0] <= rm[0] <= cm[0]
        assert em[1] <= rm[1] <= cm[1]
        profile = DeviationProfile(e_em=0.0, e_rm=rng.random(), e_cm=rng.random())
        jam = jam_scores(c, profile)
        # dominated by level 3, floored by level 1 when e_em is 0
        assert jam[0] <= cm[0] + 1e-12 and jam[1] <= cm[1] + 1e-12
        assert jam[0] >= em[0] - 1e-12 and jam[1] >= em[1] - 1e-12


def test_duplicating_slots_leaves_scores_unchanged():
    ledgers = _random_ledgers(seed=9, n=10)
    profile = DeviationProfile(e_rm=0.05, e_cm=0.2)
    assert score_set(accumulate(ledgers), profile) == \
        score_set(accumulate(ledgers + ledgers), profile)


def test_macro_role_scores_groups_by_role():
    ledgers = _random_ledgers(seed=13, n=12)
    macro = macro_role_scores(ledgers)
    assert set(macro) == {ledger.slot.role for ledger in ledgers}
    for role, scores in macro.items():
        group = [l for l in ledgers if l.slot.role == role]
        assert scores == score_set(accumulate(group), None)
