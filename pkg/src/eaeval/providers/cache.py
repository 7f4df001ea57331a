"""Append-only record cache for judge verdicts and text embeddings.

One JSON object per line, UTF-8, each line self-contained (full key plus
value) so the file is diffable and crash-safe. On reload the last record
for a key wins. A CacheStore with no path is memory-only and still
deduplicates within a run.
"""

import hashlib
import json
import threading
import time
from dataclasses import dataclass, asdict
from pathlib import Path


@dataclass(frozen=True)
class CacheRecord:
    kind: str       # "verdict" | "embedding"
    key: tuple      # verdict: (provider, template_hash, doc_id, role, gold, predicted)
    value: object   # verdict string, or embedding vector
    raw: str | None = None
    ts: float = 0.0


def key_digest(key: tuple) -> str:
    """Short stable id for a cache key; used as verdict id in match pairs."""
    joined = "\x1f".join(str(part) for part in key)
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()[:16]


class CacheStore:
    """Thread-safe key -> record store with optional JSONL persistence."""

    def __init__(self, path=None):
        self.path = Path(path) if path else None
        self._records = {}
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            self._load()

    def _load(self):
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                rec = CacheRecord(kind=obj["kind"], key=tuple(obj["key"]),
                                  value=obj["value"], raw=obj.get("raw"),
                                  ts=obj.get("ts", 0.0))
                self._records[(rec.kind, rec.key)] = rec

    def get(self, kind: str, key: tuple) -> CacheRecord | None:
        with self._lock:
            return self._records.get((kind, key))

    def put(self, kind: str, key: tuple, value, raw=None) -> CacheRecord:
        rec = CacheRecord(kind=kind, key=key, value=value, raw=raw, ts=time.time())
        with self._lock:
            self._records[(kind, key)] = rec
            if self.path:
                obj = asdict(rec)
                obj["key"] = list(rec.key)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
        return rec

    def __len__(self):
        with self._lock:
            return len(self._records)
