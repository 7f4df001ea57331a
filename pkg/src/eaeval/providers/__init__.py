"""Pluggable similarity and judge backends, plus prompt and cache plumbing."""

from .base import (
    BaseJudge,
    JudgeVerdict,
    LexicalSimilarity,
    PairContext,
    ScriptedJudge,
    ScriptedSimilarity,
    VERDICT_MATCH,
    VERDICT_NON_MATCH,
    VERDICT_UNRESOLVED,
    lexical_similarity,
    parse_verdict,
)
from .cache import CacheRecord, CacheStore, key_digest
from .prompts import (
    DEFAULT_CHAIN_OF_THOUGHT,
    DEFAULT_ZERO_SHOT,
    PromptTemplate,
    render_prompt,
)
from .remote import RemoteEmbeddingSimilarity, RemoteJudge, cosine

__all__ = [
    "BaseJudge", "JudgeVerdict", "LexicalSimilarity", "PairContext",
    "ScriptedJudge", "ScriptedSimilarity", "VERDICT_MATCH", "VERDICT_NON_MATCH",
    "VERDICT_UNRESOLVED", "lexical_similarity", "parse_verdict",
    "CacheRecord", "CacheStore", "key_digest",
    "DEFAULT_CHAIN_OF_THOUGHT", "DEFAULT_ZERO_SHOT", "PromptTemplate",
    "render_prompt", "RemoteEmbeddingSimilarity", "RemoteJudge", "cosine",
]
