"""Canonical JSON file IO with atomic replacement.

Every JSON file the package writes goes through `write_json_atomic`:
sorted keys, two-space indent, trailing newline, written to a temp file in
the target directory and renamed into place. Identical payloads therefore
produce byte-identical files, and readers never see partial writes.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any


def dumps_canonical(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json_atomic(path: str | Path, payload: Any) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(dumps_canonical(payload))
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise


def read_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def read_json_or_none(path: str | Path) -> Any:
    try:
        return read_json(path)
    except FileNotFoundError:
        return None
