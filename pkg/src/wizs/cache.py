"""Content-addressed byte stores.

Two uses share one mechanism: caching provider responses (keyed by a hash of
provider id + canonical request JSON) and storing generated image bytes (keyed
by the hash of the content itself, so refs are stable and deduplicating).
Stores are either in-memory (default) or disk-backed; disk writes go through a
temp file and an atomic rename, so concurrent readers never observe partial
content and concurrent writers of the same key are harmless (last rename wins
with identical bytes).
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
from pathlib import Path


def canonical_json(obj) -> str:
    """Deterministic JSON encoding used for cache keys."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class ByteStore:
    """Mapping from hex-digest keys to immutable byte values."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self._dir = Path(directory) if directory is not None else None
        self._mem: dict[str, bytes] = {}
        self._lock = threading.Lock()
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self._dir / key[:2] / key[2:]

    def get(self, key: str) -> bytes | None:
        if self._dir is None:
            with self._lock:
                return self._mem.get(key)
        try:
            return self._path(key).read_bytes()
        except FileNotFoundError:
            return None

    def put(self, key: str, data: bytes) -> None:
        if self._dir is None:
            with self._lock:
                self._mem[key] = bytes(data)
            return
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(f"{path.name}.tmp.{os.getpid()}.{threading.get_ident()}")
        tmp.write_bytes(data)
        os.replace(tmp, path)

    def __contains__(self, key: str) -> bool:
        return self.get(key) is not None


class RequestCache:
    """Write-through cache for provider responses.

    Keys are sha256(provider_id + canonical request). Values are the raw
    response bytes (JSON). Identical requests never reach the provider twice.
    """

    def __init__(self, store: ByteStore | None = None):
        self.store = store or ByteStore()

    @staticmethod
    def key(provider_id: str, request) -> str:
        return digest(f"{provider_id}\n{canonical_json(request)}".encode("utf-8"))

    def get_json(self, provider_id: str, request):
        raw = self.store.get(self.key(provider_id, request))
        return None if raw is None else json.loads(raw.decode("utf-8"))

    def put_json(self, provider_id: str, request, response) -> None:
        self.store.put(
            self.key(provider_id, request), canonical_json(response).encode("utf-8")
        )


class ContentStore:
    """Content-addressed store: ref = sha256 of the bytes themselves."""

    def __init__(self, store: ByteStore | None = None):
        self.store = store or ByteStore()

    def add(self, data: bytes) -> str:
        ref = digest(data)
        if ref not in self.store:
            self.store.put(ref, data)
        return ref

    def get(self, ref: str) -> bytes | None:
        return self.store.get(ref)

    def __contains__(self, ref: str) -> bool:
        return ref in self.store
