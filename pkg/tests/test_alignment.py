import json
import logging
import random

import pytest

from eaeval.alignment import (
    AlignmentSample,
    HumanLabel,
    InvalidLabel,
    JudgeDatasetPair,
    LabelStore,
    alignment_percent,
    calibrate_threshold,
    deviation_rates,
    disagreement_breakdown,
    judge_agreement,
    load_judge_dataset,
    load_samples,
    sample_for_alignment,
    write_samples,
)
from eaeval.cascade import run_cascade
from eaeval.errors import InputError
from eaeval.providers.base import ScriptedJudge, ScriptedSimilarity
from eaeval.scoring import DeviationProfile

from conftest import make_slot
from reference import random_case


def _ledgers(seed=7, n=40):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        predicted, gold, sim_table, judge_table = random_case(rng)
        slot = make_slot(predicted, gold, doc_id=f"d{i}", role=rng.choice("ab"))
        out.append(run_cascade(slot, ScriptedSimilarity(sim_table),
                               ScriptedJudge(judge_table)))
    return out


# --- sampling -------------------------------------------------------------------

def test_sampling_deterministic_for_seed():
    ledgers = _ledgers()
    a, short_a = sample_for_alignment(ledgers, 10, seed=42, dataset_id="t")
    b, short_b = sample_for_alignment(ledgers, 10, seed=42, dataset_id="t")
    assert [s.sample_id for s in a] == [s.sample_id for s in b]
    assert short_a == short_b
    c, _ = sample_for_alignment(ledgers, 10, seed=43, dataset_id="t")
    assert [s.sample_id for s in a] != [s.sample_id for s in c]


def test_sampling_shortfall_flagged():
    ledgers = _ledgers(n=4)
    samples, shortfall = sample_for_alignment(ledgers, 150, seed=0, dataset_id="t")
    available = {level: 0 for level in ("EM", "RM", "CM")}
    for ledger in ledgers:
        for pair in ledger.pairs:
            available[pair.level.name] += 1
    for level, n in available.items():
        took = sum(1 for s in samples if s.level == level)
        assert took == min(150, n)
        assert shortfall[level] == 150 - took


def test_sampling_without_replacement():
    ledgers = _ledgers(n=60)
    samples, _ = sample_for_alignment(ledgers, 20, seed=1, dataset_id="t")
    ids = [s.sample_id for s in samples]
    assert len(ids) == len(set(ids))


def test_samples_file_round_trip(tmp_path):
    ledgers = _ledgers(n=10)
    samples, shortfall = sample_for_alignment(ledgers, 5, seed=3, dataset_id="t")
    path = tmp_path / "samples.jsonl"
    write_samples(path, samples, {"dataset_id": "t", "seed": 3,
                                  "shortfall": shortfall})
    meta, loaded = load_samples(path)
    assert meta["dataset_id"] == "t"
    assert loaded == samples


# --- label store ----------------------------------------------------------------

def _store(tmp_path):
    return LabelStore(tmp_path / "labels.jsonl")


def test_label_store_persists(tmp_path):
    store = _store(tmp_path)
    store.add("s1", "match", annotator_id="ann1")
    store.add("s2", "non-match", "temporal", annotator_id="ann1")
    reloaded = _store(tmp_path)
    live = reloaded.live()
    assert live["s1"].verdict == "match"
    assert live["s2"].category == "temporal"


def test_label_store_latest_wins_history_kept(tmp_path):
    store = _store(tmp_path)
    store.add("s1", "match", annotator_id="a")
    store.add("s1", "non-match", "coreference", annotator_id="b")
    assert store.live()["s1"].verdict == "non-match"
    assert len(store.history()) == 2


def test_label_store_idempotent_repost(tmp_path):
    store = _store(tmp_path)
    store.add("s1", "match", annotator_id="a")
    store.add("s1", "match", annotator_id="a")  # refresh / retry
    assert len(store.history()) == 1


def test_label_validation(tmp_path):
    store = _store(tmp_path)
    with pytest.raises(InvalidLabel):
        store.add("s1", "non-match")  # category required
    with pytest.raises(InvalidLabel):
        store.add("s1", "non-match", "because")  # not a known category
    with pytest.raises(InvalidLabel):
        store.add("s1", "maybe")
    store.add("s1", "match", None)


# --- deviation rates ------------------------------------------------------------

def _make_samples(level, n, dataset_id="t"):
    return [AlignmentSample(sample_id=f"{dataset_id}-{level}-{i}", dataset_id=dataset_id,
                            level=level, doc_id=f"d{i}", role="r", gold="g",
                            predicted="p", document="doc", event_type="ev")
            for i in range(n)]


def _label(sample, verdict, category=None):
    return HumanLabel(sample_id=sample.sample_id, verdict=verdict, category=category)


def _labels_with_disagreements(samples, n_disagree, category="coreference"):
    labels = {}
    for i, sample in enumerate(samples):
        if i < n_disagree:
            labels[sample.sample_id] = _label(sample, "non-match", category)
        else:
            labels[sample.sample_id] = _label(sample, "match")
    return labels


def test_deviation_rate_published_cell():
    samples = _make_samples("CM", 150)
    labels = _labels_with_disagreements(samples, 20)
    profile = deviation_rates(samples, labels)
    assert profile.e_cm == pytest.approx(20 / 150)
    assert round(100 * profile.e_cm, 2) == 13.33
    assert profile.n_cm == 150


def test_deviation_rate_zero_disagreements():
    samples = _make_samples("RM", 150)
    labels = _labels_with_disagreements(samples, 0)
    assert deviation_rates(samples, labels).e_rm == 0.0


def test_deviation_rate_three_levels():
    samples = (_make_samples("EM", 150) + _make_samples("RM", 150)
               + _make_samples("CM", 150))
    labels = {}
    labels.update(_labels_with_disagreements([s for s in samples if s.level == "EM"], 0))
    labels.update(_labels_with_disagreements([s for s in samples if s.level == "RM"], 4))
    labels.update(_labels_with_disagreements([s for s in samples if s.level == "CM"], 24))
    profile = deviation_rates(samples, labels)
    assert profile.rates() == (0.0, pytest.approx(4 / 150), pytest.approx(0.16))


def test_unlabeled_samples_excluded_from_observations():
    samples = _make_samples("CM", 10)
    labels = _labels_with_disagreements(samples[:4], 2)  # 6 samples unlabeled
    profile = deviation_rates(samples, labels)
    assert profile.n_cm == 4
    assert profile.e_cm == pytest.approx(0.5)


def test_empty_level_defaults_zero_with_warning(caplog):
    samples = _make_samples("CM", 5)
    with caplog.at_level(logging.WARNING):
        profile = deviation_rates(samples, {})
    assert profile.rates() == (0.0, 0.0, 0.0)
    assert any("no labeled samples" in rec.message for rec in caplog.records)


def test_one_sidedness_adding_match_labels():
    samples = _make_samples("CM", 30)
    labels = _labels_with_disagreements(samples[:10], 3)
    before = deviation_rates(samples, labels)
    labels.update({s.sample_id: _label(s, "match") for s in samples[10:]})
    after = deviation_rates(samples, labels)
    n_d_before = before.e_cm * before.n_cm
    n_d_after = after.e_cm * after.n_cm
    assert n_d_after == pytest.approx(n_d_before)  # N_d unchanged
    assert after.n_cm == 30


def test_alignment_percent_cells():
    assert round(alignment_percent(
        DeviationProfile(e_em=0, e_rm=4 / 150, e_cm=20 / 150)), 2) == 84.0
    assert round(alignment_percent(
        DeviationProfile(e_em=0, e_rm=0, e_cm=11 / 150)), 2) == 92.67
    assert alignment_percent(DeviationProfile()) == 100.0


# --- disagreement breakdown -------------------------------------------------------

def test_breakdown_counts_and_total():
    samples = _make_samples("CM", 120, dataset_id="ds")
    labels = {}
    spec = [("numerical", 15), ("temporal", 10), ("coreference", 57), ("other", 29)]
    i = 0
    for category, count in spec:
        for _ in range(count):
            labels[samples[i].sample_id] = _label(samples[i], "non-match", category)
            i += 1
    table = disagreement_breakdown(samples, labels)
    assert table["ds"] == {"numerical": 15, "temporal": 10,
                           "coreference": 57, "other": 29}
    assert sum(table["total"].values()) == 111


def test_breakdown_all_agreement_is_empty():
    samples = _make_samples("CM", 10)
    labels = _labels_with_disagreements(samples, 0)
    table = disagreement_breakdown(samples, labels)
    assert sum(table["total"].values()) == 0


# --- judge agreement harness -------------------------------------------------------

def _judge_pairs():
    rows = [
        ("p1", "dsA", "doc one", "ev", "time", "18 april", "18 april 2024", "match"),
        ("p2", "dsA", "doc two", "ev", "time", "thursday", "friday", "non-match"),
        ("p3", "dsB", "doc three", "ev", "place", "manhattan", "chelsea, new york", "non-match"),
        ("p4", "dsB", "doc four", "ev", "drug", "naltrexone", "naltrexone therapy", "match"),
    ]
    return [JudgeDatasetPair(pair_id=a, dataset_id=b, document=c, event_type=d,
                             role=e, gold=f, predicted=g, human_verdict=h)
            for a, b, c, d, e, f, g, h in rows]


def _replay_judge(pairs, flip=()):
    script = {}
    for p in pairs:
        verdict = p.human_verdict
        if p.pair_id in flip:
            verdict = "match" if verdict == "non-match" else "non-match"
        script[(p.gold, p.predicted)] = verdict
    return ScriptedJudge(script)


def test_judge_agreement_perfect_replay():
    pairs = _judge_pairs()
    result = judge_agreement(_replay_judge(pairs), pairs)
    assert result["agreement_percent"] == 100.0
    assert result["per_dataset"] == {"dsA": 100.0, "dsB": 100.0}


def test_judge_agreement_one_wrong_of_four():
    pairs = _judge_pairs()
    result = judge_agreement(_replay_judge(pairs, flip={"p3"}), pairs)
    assert result["agreement_percent"] == 75.0
    assert result["per_dataset"]["dsB"] == 50.0


def test_judge_agreement_unresolved_counts_against():
    class Mute(ScriptedJudge):
        def _complete(self, prompt, pair):
            return "???"

    pairs = _judge_pairs()
    result = judge_agreement(Mute({}), pairs)
    assert result["agreement_percent"] == 0.0


def test_judge_dataset_file_round_trip(tmp_path):
    pairs = _judge_pairs()
    path = tmp_path / "judge.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps(p.__dict__) + "\n")
    assert load_judge_dataset(path) == pairs
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.raises(InputError):
        load_judge_dataset(empty)


# --- threshold calibration ----------------------------------------------------------

def _calibration_pairs(sims_and_verdicts):
    pairs, table = [], {}
    for i, (sim, verdict) in enumerate(sims_and_verdicts):
        pair = JudgeDatasetPair(pair_id=f"c{i}", dataset_id="ds", document="doc",
                                event_type="ev", role="r", gold=f"gold {i}",
                                predicted=f"pred {i}", human_verdict=verdict)
        pairs.append(pair)
        table[(f"gold {i}", f"pred {i}")] = sim
    return pairs, ScriptedSimilarity(table)


def test_calibrate_threshold_hand_count():
    pairs, provider = _calibration_pairs([
        (0.99, "match"), (0.96, "non-match"), (0.90, "match"),
        (0.88, "non-match"), (0.80, "match"), (0.70, "non-match"),
    ])
    rows = calibrate_threshold(pairs, provider, [0.95, 0.85, 0.75])
    by_t = {row["threshold"]: row for row in rows}
    assert by_t[0.95]["match_count"] == 2
    assert by_t[0.95]["one_sided_disagreement_percent"] == pytest.approx(100 / 6)
    assert by_t[0.85]["match_count"] == 4
    assert by_t[0.85]["one_sided_disagreement_percent"] == pytest.approx(200 / 6)
    assert by_t[0.75]["match_count"] == 5


def test_calibrate_threshold_one_is_empty():
    pairs, provider = _calibration_pairs([(1.0, "non-match"), (0.5, "match")])
    row = calibrate_threshold(pairs, provider, [1.0])[0]
    assert row["match_count"] == 0
    assert row["one_sided_disagreement_percent"] == 0.0


def test_calibrate_threshold_match_count_monotone():
    rng = random.Random(31)
    pairs, provider = _calibration_pairs(
        [(rng.random(), rng.choice(["match", "non-match"])) for _ in range(50)])
    rows = calibrate_threshold(pairs, provider, [0.9, 0.6, 0.3])
    counts = [row["match_count"] for row in rows]
    assert counts == sorted(counts)
