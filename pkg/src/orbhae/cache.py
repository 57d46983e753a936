"""Versioned JSON caches for exact results.

Every cache file records a schema tag; a file written under a different tag
is ignored rather than trusted.  Writes go through a temporary file and an
atomic rename, so concurrent writers can only lose work, never corrupt it.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

ENV_VAR = "ORBHAE_CACHE_DIR"
CACHE_VERSION = 1


def default_dir() -> Path | None:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else None


def schema_tag(name: str, **params) -> str:
    blob = json.dumps({"name": name, "version": CACHE_VERSION, **params}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def load(directory, name: str, **params):
    """Return cached payload or None."""
    if directory is None:
        return None
    path = Path(directory) / f"{name}-{schema_tag(name, **params)}.json"
    if not path.exists():
        return None
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    if data.get("schema") != schema_tag(name, **params):
        return None
    return data["payload"]


def store(directory, name: str, payload, **params) -> Path | None:
    if directory is None:
        return None
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    tag = schema_tag(name, **params)
    path = directory / f"{name}-{tag}.json"
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump({"schema": tag, "params": params, "payload": payload}, fh, sort_keys=True)
    os.replace(tmp, path)
    return path
