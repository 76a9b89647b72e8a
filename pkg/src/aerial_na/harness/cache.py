"""Result cache: one directory per digest, guarded by an advisory lock."""

from __future__ import annotations

import contextlib
import fcntl
import hashlib
import json
import os
import time
from pathlib import Path

from .config import TOOL_VERSION, ScenarioConfig

CSV_NAME = "output.csv"
META_NAME = "meta.json"
COMMAND_NAME = "command.txt"


def digest(cfg: ScenarioConfig, command: str, version: str = TOOL_VERSION) -> str:
    h = hashlib.sha256()
    for part in (cfg.serialize(), command, version):
        h.update(part.encode())
        h.update(b"\0")
    return h.hexdigest()


@contextlib.contextmanager
def locked(cache_dir: Path):
    cache_dir.mkdir(parents=True, exist_ok=True)
    with open(cache_dir / ".lock", "a") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def lookup(cache_dir: Path, key: str) -> str | None:
    path = Path(cache_dir) / key / CSV_NAME
    if path.is_file() and (Path(cache_dir) / key / META_NAME).is_file():
        return path.read_text(encoding="utf-8")
    return None


def store(cache_dir: Path, key: str, command: str, csv_text: str, seconds: float):
    entry = Path(cache_dir) / key
    entry.mkdir(parents=True, exist_ok=True)
    (entry / COMMAND_NAME).write_text(command + "\n", encoding="utf-8")
    tmp = entry / (CSV_NAME + ".tmp")
    tmp.write_text(csv_text, encoding="utf-8")
    os.replace(tmp, entry / CSV_NAME)
    meta = {"digest": key, "command": command, "seconds": round(seconds, 3),
            "version": TOOL_VERSION, "rows": max(csv_text.count("\n") - 1, 0)}
    (entry / META_NAME).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                   encoding="utf-8")


def cached(cfg: ScenarioConfig, command: str, compute, cache_dir=None, use_cache=True):
    """Return ``(csv_text, hit)``; ``compute()`` runs only on a miss."""
    if not use_cache or cache_dir is None:
        return compute(), False
    cache_dir = Path(cache_dir)
    key = digest(cfg, command)
    with locked(cache_dir):
        hit = lookup(cache_dir, key)
        if hit is not None:
            return hit, True
        start = time.perf_counter()
        text = compute()
        store(cache_dir, key, command, text, time.perf_counter() - start)
    return text, False
