"""Instantiation, composition, synchronization, and flattening."""

from ttmc.elaborate.model import FlatEvent, FlatModel, FlatTimer, FlatVar
from ttmc.elaborate.flatten import (
    build_dependency_graphs,
    compose,
    flatten,
    flatten_source,
    instantiate,
    iterated_compose,
)
from ttmc.elaborate.sync import resolve_sync

__all__ = [
    "FlatEvent", "FlatModel", "FlatTimer", "FlatVar",
    "build_dependency_graphs", "compose", "flatten", "flatten_source",
    "instantiate", "iterated_compose", "resolve_sync",
]
