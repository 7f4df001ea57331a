"""Annotation service backing the human judgment-review UI.

Serves the sampled batch, hands out unlabeled samples to annotators, stores
their verdicts, and reports progress and the live deviation profile. Labels
go through the append-only store, so every acknowledged label survives a
restart. Static UI assets are served from a configurable directory.
"""

import threading
from dataclasses import asdict

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .alignment import (
    InvalidLabel,
    LabelStore,
    alignment_percent,
    deviation_rates,
    disagreement_breakdown,
    load_samples,
    validate_label,
)
from .model import MatchLevel


class LabelIn(BaseModel):
    sample_id: str
    verdict: str
    category: str | None = None
    annotator_id: str = "anonymous"


def create_app(samples_path, labels_path, static_dir=None) -> FastAPI:
    meta, samples = load_samples(samples_path)
    by_id = {s.sample_id: s for s in samples}
    store = LabelStore(labels_path)
    assignments = {}  # sample_id -> annotator currently working on it
    lock = threading.Lock()

    app = FastAPI(title="eaeval annotation service")

    def _progress():
        live = store.live()
        per_level = {}
        for level in MatchLevel:
            level_samples = [s for s in samples if s.level == level.name]
            per_level[level.name] = {
                "total": len(level_samples),
                "labeled": sum(1 for s in level_samples if s.sample_id in live),
            }
        per_annotator = {}
        for label in live.values():
            per_annotator[label.annotator_id] = per_annotator.get(label.annotator_id, 0) + 1
        return {
            "total": len(samples),
            "labeled": len([sid for sid in live if sid in by_id]),
            "remaining": len(samples) - sum(1 for s in samples if s.sample_id in live),
            "per_level": per_level,
            "per_annotator": per_annotator,
        }

    def _deviation():
        profile = deviation_rates(samples, store.live())
        return {
            "profile": asdict(profile),
            "alignment_percent": alignment_percent(profile),
            "breakdown": disagreement_breakdown(samples, store.live()),
        }

    @app.get("/api/batch")
    def batch():
        live = store.live()
        return {
            "meta": meta,
            "samples": [dict(asdict(s),
                             labeled=s.sample_id in live,
                             live_verdict=(live[s.sample_id].verdict
                                           if s.sample_id in live else None))
                        for s in samples],
            "progress": _progress(),
        }

    @app.get("/api/next")
    def next_sample(annotator: str = "anonymous"):
        live = store.live()
        with lock:
            unlabeled = [s for s in samples if s.sample_id not in live]
            if not unlabeled:
                return {"done": True, "progress": _progress(),
                        "deviation": _deviation()}
            # prefer samples nobody else is holding; fall back to any unlabeled
            mine = [s for s in unlabeled
                    if assignments.get(s.sample_id) in (None, annotator)]
            sample = (mine or unlabeled)[0]
            assignments[sample.sample_id] = annotator
        return {"done": False, "sample": asdict(sample), "progress": _progress()}

    @app.post("/api/label")
    def label(body: LabelIn):
        if body.sample_id not in by_id:
            raise HTTPException(status_code=409,
                                detail=f"unknown sample_id: {body.sample_id}")
        try:
            validate_label(body.verdict, body.category)
        except InvalidLabel as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        store.add(body.sample_id, body.verdict, body.category, body.annotator_id)
        with lock:
            assignments.pop(body.sample_id, None)
        return {"ok": True, "progress": _progress()}

    @app.get("/api/progress")
    def progress():
        return _progress()

    @app.get("/api/deviation")
    def deviation():
        return _deviation()

    if static_dir:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app
