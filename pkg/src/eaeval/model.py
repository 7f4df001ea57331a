"""Shared domain types: documents, predictions, evaluation slots, normalization.

Matching operates on (document, role) slots; a predicted argument is only ever
compared to gold arguments of the same slot. All types are immutable value
objects and safe to share across threads.
"""

import enum
import unicodedata
from dataclasses import dataclass, field

from .errors import DuplicateDocument, DuplicateRole, EmptyArgument, UnknownDocument


class MatchLevel(enum.IntEnum):
    """The three cascade levels, in execution order."""

    EM = 1
    RM = 2
    CM = 3


@dataclass(frozen=True)
class NormalizationPolicy:
    """How argument strings are canonicalized before exact comparison.

    The default (NFC + casefold + whitespace collapse + trim) avoids penalizing
    trivially different surface forms; turn everything off for byte equality.
    """

    unicode_form: str = "NFC"
    case_fold: bool = True
    collapse_whitespace: bool = True
    trim: bool = True

    @classmethod
    def strict(cls) -> "NormalizationPolicy":
        return cls(case_fold=False, collapse_whitespace=False, trim=False)


DEFAULT_POLICY = NormalizationPolicy()


def normalize_argument(raw: str, policy: NormalizationPolicy = DEFAULT_POLICY) -> str:
    """Canonicalize one argument string. Idempotent and deterministic.

    Raises EmptyArgument when raw has no non-whitespace character.
    """
    if not raw or not raw.strip():
        raise EmptyArgument(f"argument is empty or whitespace-only: {raw!r}")
    text = unicodedata.normalize(policy.unicode_form, raw)
    if policy.case_fold:
        text = text.casefold()
    if policy.collapse_whitespace:
        text = " ".join(text.split())
    elif policy.trim:
        text = text.strip()
    return text


@dataclass(frozen=True)
class Argument:
    """One argument string: surface form, canonical form, position in its list."""

    raw: str
    normalized: str
    slot_index: int

    @classmethod
    def from_raw(cls, raw: str, slot_index: int,
                 policy: NormalizationPolicy = DEFAULT_POLICY) -> "Argument":
        return cls(raw=raw, normalized=normalize_argument(raw, policy),
                   slot_index=slot_index)


def _to_arguments(values, policy):
    return tuple(Argument.from_raw(v, i, policy) for i, v in enumerate(values))


@dataclass(frozen=True)
class DocumentRecord:
    """Gold record: document text plus role -> gold argument strings."""

    doc_id: str
    text: str
    event_type: str
    roles: dict  # role name -> list[str]
    questions: dict = field(default_factory=dict)  # optional role -> question


@dataclass(frozen=True)
class PredictionRecord:
    """Model output for one document: role -> predicted argument strings."""

    doc_id: str
    roles: dict  # role name -> list[str]
    model_id: str = "unknown"
    prompt_mode: str = "other"  # zero-shot | chain-of-thought | other


@dataclass(frozen=True)
class SlotContext:
    """What a judge (human or model) sees beyond the two argument strings."""

    text: str
    event_type: str
    question: str | None = None


@dataclass(frozen=True)
class EvaluationSlot:
    """One (document, role) cell: gold list G and predicted list P."""

    doc_id: str
    role: str
    gold: tuple  # tuple[Argument, ...]
    predicted: tuple
    context: SlotContext


def pair_slots(gold: list, predictions: list,
               policy: NormalizationPolicy = DEFAULT_POLICY) -> list:
    """Join gold documents with predictions into evaluation slots.

    One slot per (doc_id, role) present in the union of gold and predicted
    roles; a slot is emitted only if at least one side is non-empty. Roles
    predicted for a document with no gold entry get an empty G (they count
    against precision); gold roles with no prediction get an empty P.

    Raises UnknownDocument for predictions whose doc_id has no gold record,
    DuplicateDocument / DuplicateRole for repeated records.
    """
    docs = {}
    for rec in gold:
        if rec.doc_id in docs:
            raise DuplicateDocument(rec.doc_id)
        docs[rec.doc_id] = rec

    pred_roles = {}  # doc_id -> {role: [values]}
    for rec in predictions:
        if rec.doc_id not in docs:
            raise UnknownDocument(rec.doc_id)
        merged = pred_roles.setdefault(rec.doc_id, {})
        for role, values in rec.roles.items():
            if role in merged:
                raise DuplicateRole(rec.doc_id, role)
            merged[role] = list(values)

    slots = []
    for doc_id in sorted(set(docs) | set(pred_roles)):
        doc = docs[doc_id]
        p_map = pred_roles.get(doc_id, {})
        for role in sorted(set(doc.roles) | set(p_map)):
            gold_vals = doc.roles.get(role, [])
            pred_vals = p_map.get(role, [])
            if not gold_vals and not pred_vals:
                continue
            slots.append(EvaluationSlot(
                doc_id=doc_id,
                role=role,
                gold=_to_arguments(gold_vals, policy),
                predicted=_to_arguments(pred_vals, policy),
                context=SlotContext(text=doc.text, event_type=doc.event_type,
                                    question=doc.questions.get(role)),
            ))
    return slots
