"""Locating table documents and degree fixtures.

Built-in documents ship under ``cvan/data``. Extra directories can be given
in the ``CVAN_TABLE_PATH`` environment variable (os.pathsep separated); a
document found there overrides a built-in one of the same family.
"""

from __future__ import annotations

import json
import os
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .model import GenericTable, load_table

ENV_VAR = "CVAN_TABLE_PATH"


def _builtin_dir(kind: str) -> Path:
    return Path(str(resources.files("cvan") / "data" / kind))


def search_dirs(kind: str = "tables") -> list[Path]:
    dirs = []
    for part in os.environ.get(ENV_VAR, "").split(os.pathsep):
        if part.strip():
            dirs.append(Path(part.strip()))
    dirs.append(_builtin_dir(kind))
    return dirs


def _documents(kind: str) -> dict[str, Path]:
    found: dict[str, Path] = {}
    for d in reversed(search_dirs(kind)):
        if not d.is_dir():
            continue
        for path in sorted(d.glob("*.json")):
            found[path.stem] = path
    return found


def list_families() -> list[str]:
    return sorted(_documents("tables"))


@lru_cache(maxsize=None)
def _load_cached(path: str, mtime: float) -> GenericTable:
    return load_table(Path(path))


def get_table(family: str) -> GenericTable:
    docs = _documents("tables")
    if family not in docs:
        raise KeyError(f"unknown family {family!r}; known: {', '.join(sorted(docs))}")
    path = docs[family]
    return _load_cached(str(path), path.stat().st_mtime)


def list_fixture_families() -> list[str]:
    return sorted(_documents("fixtures"))


def get_fixture(family: str) -> dict:
    docs = _documents("fixtures")
    if family not in docs:
        raise KeyError(f"no degree fixture for {family!r}")
    return json.loads(docs[family].read_text(encoding="utf-8"))
