"""Bundled example models shipped with the package."""

from __future__ import annotations

import os

_HERE = os.path.dirname(os.path.abspath(__file__))


def catalog() -> dict[str, str]:
    """Name -> absolute path of every bundled .ttm model."""
    out: dict[str, str] = {}
    for root, _, files in os.walk(_HERE):
        for f in sorted(files):
            if f.endswith(".ttm"):
                rel = os.path.relpath(os.path.join(root, f), _HERE)
                name = rel[:-4].replace(os.sep, "/")
                out[name] = os.path.join(root, f)
    return out


def path(name: str) -> str:
    table = catalog()
    if name not in table:
        raise KeyError(f"no bundled model {name!r} (have: {sorted(table)})")
    return table[name]


def source(name: str) -> str:
    with open(path(name), encoding="utf-8") as fh:
        return fh.read()
