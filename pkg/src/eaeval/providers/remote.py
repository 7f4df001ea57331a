"""HTTP clients for the embedding and judge services.

Both speak JSON over POST, retry transient failures with exponential backoff,
honor Retry-After hints on 429s, and read their API keys from environment
variables so secrets never live in config files.
"""

import math
import os
import time

import requests

from ..errors import DimensionMismatch, NetworkError, RateLimited
from .base import BaseJudge
from .cache import CacheStore
from .prompts import DEFAULT_CHAIN_OF_THOUGHT, DEFAULT_ZERO_SHOT


def _post_json(session, url, payload, headers, timeout, max_retries,
               backoff_base, sleep):
    last = None
    for attempt in range(max_retries):
        if attempt:
            sleep(backoff_base * (2 ** (attempt - 1)))
        try:
            resp = session.post(url, json=payload, headers=headers, timeout=timeout)
        except requests.RequestException as exc:
            last = exc
            continue
        if resp.status_code == 429:
            hint = resp.headers.get("Retry-After")
            delay = float(hint) if hint else backoff_base * (2 ** attempt)
            last = RateLimited(f"rate limited by {url}", retry_after=delay)
            sleep(delay)
            continue
        if resp.status_code >= 500:
            last = NetworkError(f"{url} returned {resp.status_code}")
            continue
        if resp.status_code >= 400:
            raise NetworkError(f"{url} returned {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise NetworkError(f"{url} returned non-JSON body") from exc
    raise NetworkError(f"{url} unreachable after {max_retries} attempts: {last}") from (
        last if isinstance(last, Exception) else None)


def _auth_headers(api_key_env):
    key = os.environ.get(api_key_env, "")
    return {"Authorization": f"Bearer {key}"} if key else {}


def cosine(u, v) -> float:
    if len(u) != len(v):
        raise DimensionMismatch(f"vector lengths differ: {len(u)} vs {len(v)}")
    dot = math.fsum(a * b for a, b in zip(u, v))
    nu = math.sqrt(math.fsum(a * a for a in u))
    nv = math.sqrt(math.fsum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


class RemoteEmbeddingSimilarity:
    """SimilarityProvider backed by a text -> vector HTTP service.

    Request {"model": ..., "texts": [...]}, response {"embeddings": [[...]]}.
    Per-text embeddings are cached by (model, normalized text), so repeated
    pairs and warm-cache replays cost no network traffic.
    """

    deterministic = False

    def __init__(self, endpoint: str, model: str, cache: CacheStore | None = None,
                 api_key_env: str = "EAEVAL_EMBED_API_KEY", timeout: float = 30.0,
                 max_retries: int = 3, backoff_base: float = 0.5,
                 session=None, sleep=time.sleep):
        self.endpoint = endpoint
        self.model = model
        self.name = f"embedding:{model}"
        self.cache = cache if cache is not None else CacheStore()
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.session = session or requests.Session()
        self.sleep = sleep
        self.network_calls = 0
        self.cache_hits = 0

    @property
    def stats(self):
        return {"network_calls": self.network_calls, "cache_hits": self.cache_hits}

    def embed(self, texts: list) -> list:
        vectors = {}
        missing = []
        for text in dict.fromkeys(texts):  # preserve order, drop repeats
            rec = self.cache.get("embedding", (self.model, text))
            if rec is not None:
                self.cache_hits += 1
                vectors[text] = rec.value
            else:
                missing.append(text)
        if missing:
            body = _post_json(self.session, self.endpoint,
                              {"model": self.model, "texts": missing},
                              _auth_headers(self.api_key_env), self.timeout,
                              self.max_retries, self.backoff_base, self.sleep)
            self.network_calls += 1
            embedded = body.get("embeddings")
            if not isinstance(embedded, list) or len(embedded) != len(missing):
                raise NetworkError(f"{self.endpoint}: embedding count mismatch")
            for text, vector in zip(missing, embedded):
                self.cache.put("embedding", (self.model, text), vector)
                vectors[text] = vector
        return [vectors[t] for t in texts]

    def similarity(self, a: str, b: str) -> float:
        va, vb = self.embed([a, b])
        return cosine(va, vb)


class RemoteJudge(BaseJudge):
    """JudgeProvider over a chat-completion-style HTTP endpoint.

    Request {"model": ..., "messages": [...], "temperature": 0}; the verdict
    is parsed from choices[0].message.content (or a top-level "text" field).
    Temperature is pinned to 0 for determinism.
    """

    def __init__(self, endpoint: str, model: str, mode: str = "zero-shot",
                 template=None, api_key_env: str = "EAEVAL_JUDGE_API_KEY",
                 timeout: float = 60.0, backoff_base: float = 0.5,
                 session=None, sleep=time.sleep, **kwargs):
        if template is None:
            template = DEFAULT_CHAIN_OF_THOUGHT if mode == "chain-of-thought" else DEFAULT_ZERO_SHOT
        super().__init__(name=f"{model}:{mode}", template=template, **kwargs)
        self.endpoint = endpoint
        self.model = model
        self.mode = mode
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.backoff_base = backoff_base
        self.session = session or requests.Session()
        self.sleep = sleep

    def _complete(self, prompt: str, pair) -> str:
        body = _post_json(self.session, self.endpoint,
                          {"model": self.model,
                           "messages": [{"role": "user", "content": prompt}],
                           "temperature": 0},
                          _auth_headers(self.api_key_env), self.timeout,
                          self.max_retries, self.backoff_base, self.sleep)
        choices = body.get("choices")
        if choices:
            return choices[0].get("message", {}).get("content", "") or ""
        if "text" in body:
            return body["text"] or ""
        raise NetworkError(f"{self.endpoint}: response has no choices or text")
