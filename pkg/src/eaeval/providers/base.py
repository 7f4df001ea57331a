"""Provider contracts plus the deterministic offline implementations.

Similarity providers map two normalized strings to a score; judge providers
decide match / non-match / unresolved for an argument pair in context. The
offline versions here (lexical cosine, scripted tables) are pure functions,
so evaluations built on them are exactly reproducible.
"""

import json
import math
import re
from collections import Counter
from dataclasses import dataclass

from ..errors import JudgeExhausted, JudgeParseError, NetworkError, RateLimited
from .cache import CacheStore, key_digest
from .prompts import DEFAULT_ZERO_SHOT, PromptTemplate, render_prompt

VERDICT_MATCH = "match"
VERDICT_NON_MATCH = "non-match"
VERDICT_UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class PairContext:
    """Everything a judge sees for one (gold, predicted) pair."""

    doc_id: str
    role: str
    document: str
    event_type: str
    gold: str            # raw surface form, shown in prompts
    predicted: str
    gold_norm: str       # canonical form, used in cache keys
    predicted_norm: str
    question: str | None = None


@dataclass(frozen=True)
class JudgeVerdict:
    verdict: str         # match | non-match | unresolved
    verdict_id: str      # cache key digest, links pairs to cache records
    cached: bool
    raw: str | None = None


# --- similarity --------------------------------------------------------------

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


def _tokens(text: str):
    return _TOKEN_RE.findall(text)


def _char_trigrams(text: str):
    if len(text) < 3:
        return [text]
    return [text[i:i + 3] for i in range(len(text) - 2)]


def _cosine(a: Counter, b: Counter) -> float:
    if not a or not b:
        return 0.0
    dot = sum(count * b[term] for term, count in a.items())
    if dot == 0:
        return 0.0
    norm = math.sqrt(sum(c * c for c in a.values())) * math.sqrt(sum(c * c for c in b.values()))
    return dot / norm


def lexical_similarity(a: str, b: str) -> float:
    """Deterministic offline similarity in [0, 1] over normalized strings.

    Cosine over word-token term frequencies; when both sides are a single
    token that cosine is just equality, so the comparison backs off to
    character trigrams of the full strings. Symmetric, and 1.0 for equal
    inputs.
    """
    if a == b:
        return 1.0
    ta, tb = _tokens(a), _tokens(b)
    if len(ta) <= 1 and len(tb) <= 1:
        return _cosine(Counter(_char_trigrams(a)), Counter(_char_trigrams(b)))
    return _cosine(Counter(ta), Counter(tb))


class LexicalSimilarity:
    """SimilarityProvider backed by lexical_similarity; no I/O."""

    name = "lexical"
    deterministic = True

    def similarity(self, a: str, b: str) -> float:
        return lexical_similarity(a, b)

    @property
    def stats(self):
        return {}


class ScriptedSimilarity:
    """SimilarityProvider reading scores from a fixed table (tests, replays).

    The table maps (a, b) pairs of normalized strings to scores and is looked
    up symmetrically; unknown pairs score `default` except a == b which is 1.
    """

    name = "scripted-similarity"
    deterministic = True

    def __init__(self, table: dict, default: float = 0.0):
        self.table = dict(table)
        self.default = default

    def similarity(self, a: str, b: str) -> float:
        if (a, b) in self.table:
            return self.table[(a, b)]
        if (b, a) in self.table:
            return self.table[(b, a)]
        if a == b:
            return 1.0
        return self.default

    @property
    def stats(self):
        return {}


# --- judges ------------------------------------------------------------------

def parse_verdict(text: str, match_marker: str = VERDICT_MATCH,
                  non_match_marker: str = VERDICT_NON_MATCH,
                  structured: bool = False) -> str:
    """Extract a verdict from a judge response.

    Default mode searches case-insensitively for the standalone markers,
    non-match first (its text contains "match"). Structured mode expects a
    JSON object with a "verdict" field. Raises JudgeParseError otherwise.
    """
    if structured:
        try:
            obj = json.loads(text)
            verdict = str(obj["verdict"]).strip().lower()
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise JudgeParseError(f"no structured verdict in: {text!r}") from exc
        if verdict in (VERDICT_MATCH, VERDICT_NON_MATCH):
            return verdict
        raise JudgeParseError(f"unknown structured verdict: {verdict!r}")
    lowered = text.lower()
    if re.search(rf"\b{re.escape(non_match_marker)}\b", lowered):
        return VERDICT_NON_MATCH
    if re.search(rf"\b{re.escape(match_marker)}\b", lowered):
        return VERDICT_MATCH
    raise JudgeParseError(f"no verdict marker in: {text!r}")


class BaseJudge:
    """Shared judge plumbing: prompt rendering, caching, retries, parsing.

    Subclasses implement _complete(prompt, pair) -> raw response text; that is
    the only part that talks to a backend. Verdicts (including unresolved
    ones) are persisted to the cache before returning, so a warm cache
    replays an evaluation without any backend traffic.
    """

    mode = "zero-shot"

    def __init__(self, name: str, template: PromptTemplate = DEFAULT_ZERO_SHOT,
                 cache: CacheStore | None = None, max_retries: int = 3,
                 structured: bool = False):
        self.name = name
        self.template = template
        self.cache = cache if cache is not None else CacheStore()
        self.max_retries = max_retries
        self.structured = structured
        self.network_calls = 0
        self.cache_hits = 0

    @property
    def stats(self):
        return {"network_calls": self.network_calls, "cache_hits": self.cache_hits}

    def _cache_key(self, pair: PairContext) -> tuple:
        return (self.name, self.template.template_hash, pair.doc_id, pair.role,
                pair.gold_norm, pair.predicted_norm)

    def render(self, pair: PairContext) -> str:
        return render_prompt(self.template, {
            "document": pair.document,
            "event_type": pair.event_type,
            "role": pair.role,
            "gold_argument": pair.gold,
            "predicted_argument": pair.predicted,
        })

    def _complete(self, prompt: str, pair: PairContext) -> str:
        raise NotImplementedError

    def judge_pair(self, pair: PairContext) -> JudgeVerdict:
        key = self._cache_key(pair)
        cached = self.cache.get("verdict", key)
        if cached is not None:
            self.cache_hits += 1
            return JudgeVerdict(verdict=cached.value, verdict_id=key_digest(key),
                                cached=True, raw=cached.raw)
        prompt = self.render(pair)
        raw = None
        verdict = VERDICT_UNRESOLVED
        for _ in range(self.max_retries):
            try:
                raw = self._complete(prompt, pair)
            except (NetworkError, RateLimited, JudgeExhausted):
                break  # backend spent its own retries; record unresolved
            self.network_calls += 1
            try:
                verdict = parse_verdict(raw, structured=self.structured)
                break
            except JudgeParseError:
                continue
        self.cache.put("verdict", key, verdict, raw=raw)
        return JudgeVerdict(verdict=verdict, verdict_id=key_digest(key),
                            cached=False, raw=raw)


class ScriptedJudge(BaseJudge):
    """JudgeProvider replaying a fixed (gold, predicted) -> verdict table.

    Unknown pairs default to non-match. Runs through the normal render /
    cache / parse path so tests exercise the same machinery as live judges.
    """

    def __init__(self, script: dict, default: str = VERDICT_NON_MATCH,
                 name: str = "scripted-judge", **kwargs):
        super().__init__(name=name, **kwargs)
        self.script = dict(script)
        self.default = default

    @classmethod
    def from_file(cls, path, **kwargs) -> "ScriptedJudge":
        """Load a script file: JSON list of {gold, predicted, verdict}."""
        with open(path, encoding="utf-8") as fh:
            entries = json.load(fh)
        script = {(e["gold"], e["predicted"]): e["verdict"] for e in entries}
        return cls(script, **kwargs)

    def _complete(self, prompt: str, pair: PairContext) -> str:
        return self.script.get((pair.gold_norm, pair.predicted_norm), self.default)
