"""Content-addressed on-disk cache for provider calls.

Cache entries live at `<root>/<provider>/<sha256-of-request>.json`, where
the digest covers a canonical JSON encoding of the request descriptor.
Writes go to a temp file in the same directory and are renamed into place,
so a reader never observes a partial entry.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Callable

_MISS = object()


def request_digest(request: Any) -> str:
    """sha256 hex digest of a JSON-serializable request descriptor."""
    canonical = json.dumps(request, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class RequestCache:
    """Persistent JSON cache keyed by provider name and request digest."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path_for(self, provider: str, request: Any) -> Path:
        return self.root / provider / f"{request_digest(request)}.json"

    def get(self, provider: str, request: Any) -> Any:
        """Cached payload, or the module-level _MISS sentinel via get_or_call."""
        path = self.path_for(provider, request)
        try:
            with open(path, encoding="utf-8") as handle:
                return json.load(handle)
        except (FileNotFoundError, json.JSONDecodeError):
            return _MISS

    def put(self, provider: str, request: Any, payload: Any) -> None:
        path = self.path_for(provider, request)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, temp_path = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                json.dump(payload, handle, sort_keys=True)
            os.replace(temp_path, path)
        except BaseException:
            if os.path.exists(temp_path):
                os.unlink(temp_path)
            raise

    def get_or_call(
        self, provider: str, request: Any, fn: Callable[[], Any]
    ) -> Any:
        """Return the cached payload for a request or compute and store it."""
        cached = self.get(provider, request)
        if cached is not _MISS:
            return cached
        payload = fn()
        self.put(provider, request, payload)
        return payload


class NullCache(RequestCache):
    """Cache stand-in that stores nothing; every lookup calls through."""

    def __init__(self):
        pass

    def get(self, provider: str, request: Any) -> Any:
        return _MISS

    def put(self, provider: str, request: Any, payload: Any) -> None:
        return None

    def get_or_call(self, provider: str, request: Any, fn: Callable[[], Any]) -> Any:
        return fn()
