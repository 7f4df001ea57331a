"""Judge prompt templates: placeholder binding and content hashing."""

import hashlib
from dataclasses import dataclass, field

from ..errors import UnboundPlaceholder

PLACEHOLDERS = ("document", "event_type", "role", "gold_argument", "predicted_argument")


def _hash_body(body: str) -> str:
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class PromptTemplate:
    """A prompt body with {placeholder} fields; the hash keys the cache."""

    template_id: str
    body: str
    template_hash: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "template_hash", _hash_body(self.body))


class _StrictBindings(dict):
    def __missing__(self, key):
        raise UnboundPlaceholder(key)


def render_prompt(template: PromptTemplate, bindings: dict) -> str:
    """Fill a template; byte-deterministic for fixed inputs.

    Raises UnboundPlaceholder naming the first missing field. Literal braces
    in a template body must be doubled ({{ }}), standard format semantics.
    """
    return template.body.format_map(_StrictBindings(bindings))


DEFAULT_ZERO_SHOT = PromptTemplate(
    template_id="judge-zero-shot-v1",
    body=(
        "You are checking role-specific argument extraction against a reference.\n"
        "Document: {document}\n"
        "Event type: {event_type}\n"
        "Role: {role}\n"
        "Reference argument: {gold_argument}\n"
        "Predicted argument: {predicted_argument}\n"
        "Given the document, do the reference and predicted arguments convey the "
        "same information for this role? Answer with exactly one word: "
        "match or non-match."
    ),
)

DEFAULT_CHAIN_OF_THOUGHT = PromptTemplate(
    template_id="judge-chain-of-thought-v1",
    body=(
        "You are checking role-specific argument extraction against a reference.\n"
        "Document: {document}\n"
        "Event type: {event_type}\n"
        "Role: {role}\n"
        "Reference argument: {gold_argument}\n"
        "Predicted argument: {predicted_argument}\n"
        "Reason step by step about whether the two arguments convey the same "
        "information for this role in this document, considering numbers, dates, "
        "and who or what each phrase refers to. Finish with one line containing "
        "only your verdict: match or non-match."
    ),
)
