"""Command-line entry point.

Subcommands: evaluate (full cascade + report files), align sample/serve/compute
(the human-alignment loop), select-judge (agreement harness over a labeled
judge dataset), calibrate (similarity-threshold disagreement rates).
Exit codes: 0 success, 2 input error, 3 provider failure, 4 internal error.
"""

import functools
import json
import socket
import sys
from dataclasses import asdict
from pathlib import Path

import click

from .alignment import (
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
from .errors import EaevalError, InputError, NoLedgers
from .pipeline import RunConfig, evaluate, load_run_ledgers, refresh_report, write_run
from .providers.base import LexicalSimilarity, ScriptedJudge
from .providers.cache import CacheStore
from .providers.remote import RemoteEmbeddingSimilarity, RemoteJudge
from .reporting import canonical_json_bytes


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EaevalError as exc:
            click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
                       err=True)
            sys.exit(exc.exit_code)
        except Exception as exc:  # noqa: BLE001 - report, then exit 4
            click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
                       err=True)
            sys.exit(4)
    return wrapper


@click.group()
def main():
    """Cascaded argument-matching evaluation with a human-alignment loop."""


@main.command("evaluate")
@click.option("--dataset", required=True, type=click.Path(), help="Unified dataset file.")
@click.option("--predictions", required=True, type=click.Path(), help="Prediction file.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
@click.option("--threshold", default=0.85, show_default=True,
              help="Similarity threshold for level-2 matching.")
@click.option("--similarity", "similarity_kind", default="lexical", show_default=True,
              type=click.Choice(["lexical", "remote"]))
@click.option("--embed-endpoint", default=None, help="Embedding service URL (remote similarity).")
@click.option("--embed-model", default=None, help="Embedding model id (remote similarity).")
@click.option("--judge", "judge_kind", default="scripted", show_default=True,
              type=click.Choice(["scripted", "remote"]))
@click.option("--judge-script", default=None, type=click.Path(),
              help="Verdict table for the scripted judge.")
@click.option("--judge-endpoint", default=None, help="Chat-completion URL (remote judge).")
@click.option("--judge-model", default=None, help="Judge model id (remote judge).")
@click.option("--judge-mode", default="zero-shot", show_default=True,
              type=click.Choice(["zero-shot", "chain-of-thought"]))
@click.option("--structured-verdicts", is_flag=True,
              help="Parse judge replies as JSON objects with a verdict field.")
@click.option("--template", "template_path", default=None, type=click.Path(),
              help="Judge prompt template file.")
@click.option("--cache", "cache_path", default=None, type=click.Path(),
              help="Verdict/embedding cache file (enables exact replay).")
@click.option("--deviation", "deviation_path", default=None, type=click.Path(),
              help="Deviation profile JSON to apply to the aligned score.")
@click.option("--seed", default=0, show_default=True)
@click.option("--sample-n", default=150, show_default=True,
              help="Alignment samples per level (recorded in run config).")
@click.option("--in-flight", default=4, show_default=True,
              help="Concurrent slots / in-flight provider calls.")
@click.option("--keep-going", is_flag=True, help="Skip failing slots instead of aborting.")
@click.option("--short-circuit", is_flag=True,
              help="Skip judge pairs whose arguments both already matched.")
@click.option("--case-fold/--no-case-fold", default=True, show_default=True)
@click.option("--collapse-whitespace/--no-collapse-whitespace", default=True,
              show_default=True)
@click.option("--trim/--no-trim", default=True, show_default=True)
@handle_errors
def cmd_evaluate(dataset, predictions, out_dir, threshold, similarity_kind,
                 embed_endpoint, embed_model, judge_kind, judge_script,
                 judge_endpoint, judge_model, judge_mode, structured_verdicts,
                 template_path, cache_path, deviation_path, seed, sample_n,
                 in_flight, keep_going, short_circuit, case_fold,
                 collapse_whitespace, trim):
    """Run the full matching cascade and write report files."""
    similarity = {"kind": similarity_kind}
    if similarity_kind == "remote":
        if not (embed_endpoint and embed_model):
            raise InputError("remote similarity needs --embed-endpoint and --embed-model")
        similarity.update(endpoint=embed_endpoint, model=embed_model)
    judge = {"kind": judge_kind}
    if judge_kind == "scripted":
        if judge_script:
            judge["script"] = judge_script
    else:
        if not (judge_endpoint and judge_model):
            raise InputError("remote judge needs --judge-endpoint and --judge-model")
        judge.update(endpoint=judge_endpoint, model=judge_model, mode=judge_mode,
                     structured=structured_verdicts)
    config = RunConfig(
        dataset_path=dataset, predictions_path=predictions, out_dir=out_dir,
        threshold=threshold, case_fold=case_fold,
        collapse_whitespace=collapse_whitespace, trim=trim,
        similarity=similarity, judge=judge, template_path=template_path,
        cache_path=cache_path, deviation_path=deviation_path, seed=seed,
        per_level_sample_n=sample_n, in_flight=in_flight, keep_going=keep_going,
        short_circuit=short_circuit)
    report, ledgers = evaluate(config)
    paths = write_run(out_dir, report, ledgers, config)
    click.echo(Path(paths["report_txt"]).read_text(encoding="utf-8"), nl=False)
    click.echo(f"wrote {paths['report_json']}")


@main.group("align")
def align():
    """Human judgment-alignment workflow."""


@align.command("sample")
@click.option("--run", "run_dir", required=True, type=click.Path(),
              help="Output directory of a previous evaluate run.")
@click.option("--n", "per_level_n", default=150, show_default=True,
              help="Samples per matching level.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Samples batch file to write.")
@handle_errors
def align_sample(run_dir, per_level_n, seed, out_path):
    """Draw matched pairs per level for human review."""
    ledgers_path = Path(run_dir) / "ledgers.jsonl"
    if not ledgers_path.exists():
        raise NoLedgers(f"{ledgers_path} not found; run evaluate first")
    meta, ledgers = load_run_ledgers(ledgers_path)
    samples, shortfall = sample_for_alignment(ledgers, per_level_n, seed,
                                              meta["dataset_id"])
    write_samples(out_path, samples, {
        "dataset_id": meta["dataset_id"], "model_id": meta["model_id"],
        "prompt_mode": meta["prompt_mode"], "per_level_n": per_level_n,
        "seed": seed, "shortfall": shortfall,
    })
    click.echo(f"wrote {len(samples)} samples to {out_path}")
    for level, missing in shortfall.items():
        if missing > 0:
            click.echo(f"note: level {level} short by {missing} samples", err=True)


@align.command("serve")
@click.option("--samples", "samples_path", required=True, type=click.Path())
@click.option("--labels", "labels_path", required=True, type=click.Path(),
              help="Append-only label store (created if missing).")
@click.option("--static", "static_dir", default=None, type=click.Path(),
              help="Directory of built UI assets to serve at /.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8401, show_default=True)
@handle_errors
def align_serve(samples_path, labels_path, static_dir, host, port):
    """Start the annotation service."""
    import uvicorn

    from .service import create_app

    if static_dir and not Path(static_dir).is_dir():
        raise InputError(f"static directory not found: {static_dir}")
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise InputError(f"port {port} on {host} unavailable: {exc}") from exc
    finally:
        probe.close()
    app = create_app(samples_path, labels_path, static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


@align.command("compute")
@click.option("--samples", "samples_path", required=True, type=click.Path())
@click.option("--labels", "labels_path", required=True, type=click.Path())
@click.option("--run", "run_dir", default=None, type=click.Path(),
              help="Evaluate run to refresh with the measured profile.")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Where to write the deviation profile JSON.")
@handle_errors
def align_compute(samples_path, labels_path, run_dir, out_path):
    """Compute deviation rates from labels; optionally refresh a run's report."""
    meta, samples = load_samples(samples_path)
    live = LabelStore(labels_path).live()
    profile = deviation_rates(samples, live, dataset_id=meta.get("dataset_id"))
    summary = {
        "profile": asdict(profile),
        "alignment_percent": alignment_percent(profile),
        "breakdown": disagreement_breakdown(samples, live),
    }
    if out_path:
        Path(out_path).write_bytes(canonical_json_bytes(summary))
    click.echo(json.dumps(summary["profile"], sort_keys=True))
    click.echo(f"alignment: {alignment_percent(profile):.2f}%")
    if run_dir:
        report_path = Path(run_dir) / "report.json"
        ledgers_path = Path(run_dir) / "ledgers.jsonl"
        if not (report_path.exists() and ledgers_path.exists()):
            raise NoLedgers(f"{run_dir} has no report.json/ledgers.jsonl")
        _, ledgers = load_run_ledgers(ledgers_path)
        refreshed = refresh_report(report_path, ledgers, profile)
        jam = refreshed.scores.jam
        click.echo(f"refreshed {report_path}: aligned F1 {100 * jam.f1:.2f}")


def _scripted_judges(paths, cache):
    for path in paths:
        yield ScriptedJudge.from_file(path, cache=cache,
                                      name=f"scripted:{Path(path).stem}")


def _remote_judges(specs, modes, cache):
    for spec in specs:
        model, _, endpoint = spec.partition("@")
        if not endpoint:
            raise InputError(f"--judge-remote wants MODEL@ENDPOINT, got {spec!r}")
        for mode in modes:
            yield RemoteJudge(endpoint=endpoint, model=model, mode=mode, cache=cache)


@main.command("select-judge")
@click.option("--judge-dataset", required=True, type=click.Path(),
              help="Human-labeled argument pairs, one JSON record per line.")
@click.option("--judge-script", "judge_scripts", multiple=True, type=click.Path(),
              help="Scripted judge verdict table (repeatable).")
@click.option("--judge-remote", "judge_remotes", multiple=True,
              help="Remote judge as MODEL@ENDPOINT (repeatable).")
@click.option("--modes", default="zero-shot,chain-of-thought", show_default=True,
              help="Prompt modes to test for each remote judge.")
@click.option("--cache", "cache_path", default=None, type=click.Path())
@click.option("--out", "out_path", default=None, type=click.Path())
@handle_errors
def cmd_select_judge(judge_dataset, judge_scripts, judge_remotes, modes,
                     cache_path, out_path):
    """Score candidate judges by agreement with human labels."""
    pairs = load_judge_dataset(judge_dataset)
    cache = CacheStore(cache_path)
    judges = list(_scripted_judges(judge_scripts, cache))
    judges += list(_remote_judges(judge_remotes, [m.strip() for m in modes.split(",") if m.strip()], cache))
    if not judges:
        raise InputError("no judges given; use --judge-script or --judge-remote")
    results = []
    for judge in judges:
        try:
            results.append(judge_agreement(judge, pairs))
        except EaevalError as exc:
            results.append({"judge": judge.name, "mode": judge.mode,
                            "agreement_percent": 0.0, "error": str(exc),
                            "per_dataset": {}, "n_pairs": 0, "skipped": []})
    results.sort(key=lambda r: -r["agreement_percent"])
    click.echo(f"{'judge':<32} {'mode':<18} {'agreement %':>12} {'pairs':>6}")
    for i, row in enumerate(results):
        marker = " *best*" if i == 0 else ""
        click.echo(f"{row['judge']:<32} {row['mode']:<18} "
                   f"{row['agreement_percent']:>12.2f} {row['n_pairs']:>6}{marker}")
        if row.get("error"):
            click.echo(f"  error: {row['error']}", err=True)
    if out_path:
        Path(out_path).write_bytes(canonical_json_bytes(results))


@main.command("calibrate")
@click.option("--pairs", "pairs_path", required=True, type=click.Path(),
              help="Human-labeled pairs in the judge-dataset format.")
@click.option("--thresholds", default="0.95,0.85,0.75", show_default=True)
@click.option("--similarity", "similarity_kind", default="lexical", show_default=True,
              type=click.Choice(["lexical", "remote"]))
@click.option("--embed-endpoint", default=None)
@click.option("--embed-model", default=None)
@click.option("--cache", "cache_path", default=None, type=click.Path())
@click.option("--out", "out_path", default=None, type=click.Path())
@handle_errors
def cmd_calibrate(pairs_path, thresholds, similarity_kind, embed_endpoint,
                  embed_model, cache_path, out_path):
    """Report threshold disagreement rates against human labels."""
    pairs = load_judge_dataset(pairs_path)
    if similarity_kind == "remote":
        if not (embed_endpoint and embed_model):
            raise InputError("remote similarity needs --embed-endpoint and --embed-model")
        provider = RemoteEmbeddingSimilarity(endpoint=embed_endpoint,
                                             model=embed_model,
                                             cache=CacheStore(cache_path))
    else:
        provider = LexicalSimilarity()
    values = [float(t) for t in thresholds.split(",") if t.strip()]
    rows = calibrate_threshold(pairs, provider, values)
    click.echo(f"{'threshold':>9} {'matches':>8} {'one-sided %':>12} {'two-sided %':>12}")
    for row in rows:
        click.echo(f"{row['threshold']:>9.2f} {row['match_count']:>8} "
                   f"{row['one_sided_disagreement_percent']:>12.2f} "
                   f"{row['two_sided_disagreement_percent']:>12.2f}")
    if out_path:
        Path(out_path).write_bytes(canonical_json_bytes(rows))


if __name__ == "__main__":
    main()
