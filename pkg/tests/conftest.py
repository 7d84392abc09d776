from __future__ import annotations

import pytest

from ttmc import models
from ttmc.elaborate.flatten import flatten_source

_CACHE: dict[str, object] = {}


def flat_model(name: str):
    """Flattened bundled model, cached across the whole test session
    (engine compilation is shared too)."""
    if name not in _CACHE:
        _CACHE[name] = flatten_source(models.source(name))
    return _CACHE[name]


@pytest.fixture(scope="session")
def train_abstract():
    return flat_model("train_abstract")


@pytest.fixture(scope="session")
def train_abstract_demonic():
    return flat_model("train_abstract_demonic")


@pytest.fixture(scope="session")
def train_refined():
    return flat_model("train_refined")


@pytest.fixture(scope="session")
def nop_sync():
    return flat_model("nop_sync")


@pytest.fixture(scope="session")
def nop_refined():
    return flat_model("nop_refined")


@pytest.fixture(scope="session")
def philosophers():
    return flat_model("philosophers")


def property_formula(flat, name: str):
    from ttmc.syntax.ltl import parse_ltl

    table = {n: (t, p) for n, t, p in flat.properties}
    text, pos = table[name]
    return parse_ltl(text, flat, pos)
