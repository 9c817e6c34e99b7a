"""On-disk cache for conductor tables and zero archives, with advisory locking."""

from __future__ import annotations

import json
import os
from pathlib import Path

from filelock import FileLock

_ENV_VAR = "PRIMERACE_CACHE_DIR"


def cache_dir() -> Path:
    override = os.environ.get(_ENV_VAR)
    if override:
        path = Path(override)
    else:
        path = Path.home() / ".cache" / "primerace"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _paths(key: str, suffix: str) -> tuple[Path, FileLock]:
    base = cache_dir() / f"{key}{suffix}"
    lock = FileLock(str(base) + ".lock")
    return base, lock


def get_text(key: str, suffix: str = ".txt") -> str | None:
    path, lock = _paths(key, suffix)
    with lock:
        if path.is_file():
            return path.read_text()
    return None


def put_text(key: str, text: str, suffix: str = ".txt") -> None:
    path, lock = _paths(key, suffix)
    with lock:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text)
        tmp.replace(path)


def get_json(key: str):
    raw = get_text(key, suffix=".json")
    return None if raw is None else json.loads(raw)


def put_json(key: str, obj) -> None:
    put_text(key, json.dumps(obj, sort_keys=True), suffix=".json")
