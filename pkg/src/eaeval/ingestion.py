"""Reading and validating the unified dataset and prediction files.

Both formats are UTF-8 JSON lines: the first line is a header object, every
following line one record. Dataset records are {doc_id, text, event_type,
roles: {role: [argument strings]}} with an optional questions map; prediction
records are {doc_id, roles: {...}}. Multiple arguments inside one string are
separated by semicolons and split on read.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DuplicateDocument,
    DuplicateRole,
    MissingHeader,
    ParseError,
    UnknownDocument,
)
from .model import DocumentRecord, PredictionRecord

log = logging.getLogger(__name__)

SCHEMA_VERSION = "regen-1"

_PROMPT_MODES = ("zero-shot", "chain-of-thought")


def split_multi_argument(raw: str) -> list:
    """Split a semicolon-separated argument string; trims pieces, drops empties."""
    return [piece.strip() for piece in raw.split(";") if piece.strip()]


def _pairs_hook(pairs):
    seen = {}
    dups = []
    for key, value in pairs:
        if key in seen:
            dups.append(key)
        seen[key] = value
    if dups:
        seen["__duplicate_keys__"] = dups
    return seen


def _iter_records(path):
    """Yield (line_no, object) for every non-blank line; line 1 is the header."""
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped, object_pairs_hook=_pairs_hook)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON: {exc.msg}") from exc
            yield line_no, obj


def _strip_markers(obj):
    if isinstance(obj, dict):
        obj.pop("__duplicate_keys__", None)
        for value in obj.values():
            _strip_markers(value)
    elif isinstance(obj, list):
        for value in obj:
            _strip_markers(value)


def _check_duplicate_roles(obj, doc_id):
    roles = obj.get("roles", {})
    dups = roles.get("__duplicate_keys__") if isinstance(roles, dict) else None
    if dups:
        raise DuplicateRole(doc_id, dups[0])
    _strip_markers(obj)


def _split_role_map(roles) -> dict:
    return {role: [arg for value in values for arg in split_multi_argument(str(value))]
            for role, values in roles.items()}


@dataclass(frozen=True)
class DatasetStats:
    """Corpus shape: unique events/roles, document and argument volume."""

    n_events: int
    n_roles: int
    n_docs: int
    n_arguments: int
    avg_doc_length_words: float
    argument_density: float


def dataset_stats(records) -> DatasetStats:
    events, roles = set(), set()
    n_args = 0
    total_words = 0
    for rec in records:
        events.add(rec.event_type)
        roles.update(rec.roles)
        n_args += sum(len(v) for v in rec.roles.values())
        total_words += len(rec.text.split())
    n_docs = len(records)
    return DatasetStats(
        n_events=len(events),
        n_roles=len(roles),
        n_docs=n_docs,
        n_arguments=n_args,
        avg_doc_length_words=total_words / n_docs if n_docs else 0.0,
        argument_density=n_args / n_docs if n_docs else 0.0,
    )


def load_dataset(path):
    """Read a unified dataset file.

    Returns (dataset_id, records, stats). Raises ParseError with the line
    number for malformed lines, MissingHeader, DuplicateDocument, and
    DuplicateRole; an empty dataset only logs a warning.
    """
    records = []
    seen = set()
    dataset_id = None
    for line_no, obj in _iter_records(path):
        if dataset_id is None:
            if "dataset_id" not in obj:
                raise MissingHeader(path, "dataset_id")
            dataset_id = obj["dataset_id"]
            version = obj.get("schema_version", SCHEMA_VERSION)
            if version != SCHEMA_VERSION:
                log.warning("%s: schema_version %r, expected %r", path, version,
                            SCHEMA_VERSION)
            continue
        doc_id = obj.get("doc_id")
        if not doc_id:
            raise ParseError(path, line_no, "record has no doc_id")
        if doc_id in seen:
            raise DuplicateDocument(doc_id)
        seen.add(doc_id)
        _check_duplicate_roles(obj, doc_id)
        text = obj.get("text", "")
        if not text.strip():
            raise ParseError(path, line_no, f"document {doc_id!r} has empty text")
        records.append(DocumentRecord(
            doc_id=doc_id,
            text=text,
            event_type=obj.get("event_type", ""),
            roles=_split_role_map(obj.get("roles", {})),
            questions=dict(obj.get("questions", {})),
        ))
    if dataset_id is None:
        raise MissingHeader(path, "dataset_id")
    if not records:
        log.warning("%s: dataset %r has no records", path, dataset_id)
    return dataset_id, records, dataset_stats(records)


def write_dataset(path, dataset_id, records):
    """Write records back in the unified format (round-trips with load_dataset)."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {"dataset_id": dataset_id, "schema_version": SCHEMA_VERSION}
        fh.write(json.dumps(header, ensure_ascii=False, sort_keys=True) + "\n")
        for rec in records:
            obj = {"doc_id": rec.doc_id, "text": rec.text,
                   "event_type": rec.event_type, "roles": rec.roles}
            if rec.questions:
                obj["questions"] = rec.questions
            fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")


def load_predictions(path, dataset_records):
    """Read a prediction file against a loaded dataset.

    Returns (model_id, prompt_mode, records). Every record's doc_id must
    resolve to a dataset document; the header must carry model_id.
    """
    known = {rec.doc_id for rec in dataset_records}
    records = []
    model_id = None
    prompt_mode = "other"
    saw_header = False
    for line_no, obj in _iter_records(path):
        if not saw_header:
            if "model_id" not in obj:
                raise MissingHeader(path, "model_id")
            saw_header = True
            model_id = obj["model_id"]
            mode = obj.get("prompt_mode", "other")
            prompt_mode = mode if mode in _PROMPT_MODES else "other"
            continue
        doc_id = obj.get("doc_id")
        if not doc_id:
            raise ParseError(path, line_no, "record has no doc_id")
        if doc_id not in known:
            raise UnknownDocument(doc_id)
        _check_duplicate_roles(obj, doc_id)
        records.append(PredictionRecord(
            doc_id=doc_id,
            roles=_split_role_map(obj.get("roles", {})),
            model_id=model_id,
            prompt_mode=prompt_mode,
        ))
    if not saw_header:
        raise MissingHeader(path, "model_id")
    return model_id, prompt_mode, records


def load_path(path) -> Path:
    p = Path(path)
    if not p.exists():
        raise ParseError(p, 0, "file not found")
    return p
