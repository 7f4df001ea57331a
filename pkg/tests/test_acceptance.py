"""Acceptance suite: one test per exit criterion, at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v` for one pass/fail line per
criterion. Reference values are fixed test vectors in reference_tables.py.
"""

import json
import random

import pytest
from click.testing import CliRunner

from eaeval.alignment import (
    AlignmentSample,
    HumanLabel,
    alignment_percent,
    deviation_rates,
    disagreement_breakdown,
)
from eaeval.cli import main
from eaeval.ingestion import dataset_stats
from eaeval.model import DocumentRecord, MatchLevel
from eaeval.scoring import (
    CorpusCounts,
    DeviationProfile,
    f1_score,
    jam_scores,
    reduction_percent,
)
from eaeval.reporting import trunc_percent

from reference_tables import (
    ALIGNMENT_AVG,
    ALIGNMENT_ROWS,
    BREAKDOWN_TOTALS,
    DATASET_DENSITIES,
    INFERENCE_AVG_REDUCTION,
    INFERENCE_TOTALS,
    RESULT_TABLES,
)
from test_cascade import _cascade_vs_reference


def _counts_from_cumulative(precisions, recalls, scale=1_000_000):
    np_parts = [round(scale * p / 100) for p in precisions]
    ng_parts = [round(scale * r / 100) for r in recalls]
    return CorpusCounts(
        np_e=np_parts[0], np_r=np_parts[1] - np_parts[0], np_c=np_parts[2] - np_parts[1],
        ng_e=ng_parts[0], ng_r=ng_parts[1] - ng_parts[0], ng_c=ng_parts[2] - ng_parts[1],
        p_total=scale, g_total=scale,
    )


def test_criterion_jam_recomputation():
    """Aligned-score recomputation on two published rows, within 0.05."""
    counts = _counts_from_cumulative([14.14, 19.40, 43.99], [20.76, 28.49, 57.57])
    profile = DeviationProfile(e_em=0.0, e_rm=0.0267, e_cm=0.1333)
    p, r, f1 = jam_scores(counts, profile)
    assert 100 * p == pytest.approx(40.58, abs=0.05)
    assert 100 * r == pytest.approx(53.50, abs=0.05)
    assert 100 * f1 == pytest.approx(46.16, abs=0.05)

    counts = _counts_from_cumulative([51.38, 59.34, 77.36], [56.18, 64.74, 80.63])
    p, _, _ = jam_scores(counts, DeviationProfile(e_cm=0.0733))
    assert 100 * p == pytest.approx(76.04, abs=0.05)
    print("[acceptance] JAM recomputation: PASS")


def test_criterion_f1_self_consistency():
    """2PR/(P+R) reproduces every transcribed F1 within 0.02 (rounding)."""
    checked = 0
    for dataset, table in RESULT_TABLES.items():
        for model, *levels in table:
            for precision, recall, f1 in levels:
                recomputed = 100 * f1_score(precision / 100, recall / 100)
                assert recomputed == pytest.approx(f1, abs=0.02), (dataset, model)
                checked += 1
    assert checked == 288
    print(f"[acceptance] F1 self-consistency: PASS ({checked} triples)")


def test_criterion_inference_accounting():
    """Reduction percents reproduce each table cell at 2 decimals, avg 41.20."""
    reductions = []
    for dataset, (baseline, actual, cell) in INFERENCE_TOTALS.items():
        pct = reduction_percent(baseline, actual)
        assert trunc_percent(pct) == cell, dataset
        reductions.append(pct)
    assert trunc_percent(reduction_percent(12206, 4436)) == 63.65
    assert trunc_percent(reduction_percent(3562, 2387)) == 32.98
    average = sum(reductions) / len(reductions)
    assert average == pytest.approx(INFERENCE_AVG_REDUCTION, abs=0.05)
    print(f"[acceptance] inference accounting: PASS (avg {average:.2f}%)")


def _synthetic_alignment(dataset, non_match_per_level, categories):
    """150 labeled samples per level with the given disagreement shape."""
    samples, labels = [], {}
    category_pool = [cat for cat, count in
                     zip(("numerical", "temporal", "coreference", "other"), categories)
                     for _ in range(count)]
    pool_iter = iter(category_pool)
    for level, non_match in zip(MatchLevel, non_match_per_level):
        for i in range(150):
            sample = AlignmentSample(
                sample_id=f"{dataset}-{level.name}-{i}", dataset_id=dataset,
                level=level.name, doc_id=f"d{i}", role="r", gold="g", predicted="p",
                document="doc", event_type="ev")
            samples.append(sample)
            if i < non_match:
                labels[sample.sample_id] = HumanLabel(
                    sample_id=sample.sample_id, verdict="non-match",
                    category=next(pool_iter))
            else:
                labels[sample.sample_id] = HumanLabel(
                    sample_id=sample.sample_id, verdict="match")
    return samples, labels


def test_criterion_alignment_arithmetic():
    """Synthetic label sets reproduce every alignment cell and the breakdown."""
    all_samples, all_labels = [], {}
    alignments = []
    for dataset, (per_level, categories, cell) in ALIGNMENT_ROWS.items():
        samples, labels = _synthetic_alignment(dataset, per_level, categories)
        all_samples.extend(samples)
        all_labels.update(labels)
        profile = deviation_rates(samples, labels, dataset_id=dataset)
        assert profile.e_em == 0.0
        got = round(alignment_percent(profile), 2)
        assert got == cell, dataset
        alignments.append(got)
    assert round(sum(alignments) / len(alignments), 2) == ALIGNMENT_AVG

    # review protocol volume: 150 per level per dataset, 900 per level overall
    assert len(all_samples) == 2700

    table = disagreement_breakdown(all_samples, all_labels)
    for dataset, (_, categories, _) in ALIGNMENT_ROWS.items():
        expected = dict(zip(("numerical", "temporal", "coreference", "other"),
                            categories))
        assert table[dataset] == expected, dataset
    assert table["total"] == BREAKDOWN_TOTALS
    assert sum(table["total"].values()) == 111
    print("[acceptance] alignment arithmetic: PASS (111 disagreements, "
          f"avg alignment {ALIGNMENT_AVG})")


def test_criterion_dataset_density():
    """Argument density from (docs, arguments) matches all published cells."""
    for dataset, (n_docs, n_args, published) in DATASET_DENSITIES.items():
        base, extra = divmod(n_args, n_docs)
        records = [DocumentRecord(doc_id=f"{dataset}-{i}", text="w w w",
                                  event_type="ev",
                                  roles={"r": ["a"] * (base + (1 if i < extra else 0))})
                   for i in range(n_docs)]
        stats = dataset_stats(records)
        assert stats.n_arguments == n_args and stats.n_docs == n_docs
        assert stats.argument_density == pytest.approx(published, abs=0.01), dataset
    print("[acceptance] dataset density: PASS (6 datasets)")


def test_criterion_cascade_oracle_equivalence():
    """>= 1000 randomized slots agree with the naive reference on all counts."""
    _cascade_vs_reference(trials=1000, seed=101)
    print("[acceptance] cascade oracle equivalence: PASS (1000 slots)")


def test_criterion_replay_determinism(fixtures_dir, tmp_path):
    """Two warm-cache CLI runs: byte-identical reports, zero judge calls."""
    cache = tmp_path / "cache.jsonl"

    def run(out_dir):
        result = CliRunner().invoke(main, [
            "evaluate",
            "--dataset", fixtures_dir + "/dataset.jsonl",
            "--predictions", fixtures_dir + "/predictions.jsonl",
            "--judge-script", fixtures_dir + "/judge_script.json",
            "--cache", str(cache),
            "--out", str(out_dir)])
        assert result.exit_code == 0, result.output
        return (out_dir / "report.json").read_bytes()

    run(tmp_path / "warmup")
    first = run(tmp_path / "run1")
    second = run(tmp_path / "run2")
    assert first == second
    meta = json.loads(first)["meta"]
    assert meta["cache_stats"]["judge"]["network_calls"] == 0
    assert meta["cache_stats"]["judge"]["cache_hits"] == 4
    print("[acceptance] replay determinism: PASS (byte-identical, 0 judge calls)")


def test_criterion_desk_scale_substitution_note():
    """The headline corpus-scale results are out of reach for this suite.

    Reproducing the reported model scores (e.g. +23.93 average F1 gain, 86.17
    judge agreement) needs the six full test sets, a sentence-embedding
    service, and a live judge model. This suite substitutes the arithmetic and
    property checks above, which exercise every scoring equation against the
    published numbers; random sweeps cover the cascade itself.
    """
    substitutes = [
        test_criterion_jam_recomputation,
        test_criterion_f1_self_consistency,
        test_criterion_inference_accounting,
        test_criterion_alignment_arithmetic,
        test_criterion_dataset_density,
        test_criterion_cascade_oracle_equivalence,
    ]
    assert len(substitutes) == 6
    print("[acceptance] desk-scale substitution: NOTED (headline model scores "
          "need the full corpora and live providers; equations covered above)")
