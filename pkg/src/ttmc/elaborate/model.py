"""Resolved model types: the flattened module instance and its events.

Runtime values are plain Python data: bool, int, interned symbol ids (int)
for enumeration members, and tuples for queues.  Arrays live inside one
variable slot as a tuple indexed by the array's index type.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ttmc.diagnostics import NO_POS, Pos
from ttmc.syntax import ast


# ── resolved types ───────────────────────────────────────────────


@dataclass(frozen=True)
class TBool:
    def values(self):
        return (False, True)

    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class TInt:
    lo: int
    hi: int

    def values(self):
        return tuple(range(self.lo, self.hi + 1))

    def __str__(self):
        return f"{self.lo}..{self.hi}"


@dataclass(frozen=True)
class TEnum:
    """Finite symbolic type; members are global symbol ids."""

    name: str | None
    members: tuple[int, ...]

    def values(self):
        return self.members

    def __str__(self):
        return self.name or "enum"


@dataclass(frozen=True)
class TArray:
    index: "Type"
    elem: "Type"

    def __str__(self):
        return f"array {self.index} of {self.elem}"


@dataclass(frozen=True)
class TQueue:
    elem: "Type"
    capacity: int

    def __str__(self):
        return f"queue[{self.elem}]({self.capacity})"


Type = TBool | TInt | TEnum | TArray | TQueue


def finite_values(t: Type):
    """Enumerable value domain of a scalar type (not arrays or queues)."""
    if isinstance(t, (TBool, TInt, TEnum)):
        return t.values()
    raise TypeError(f"type {t} has no enumerable scalar domain")


def array_positions(t: TArray) -> int:
    return len(finite_values(t.index))


def default_value(t: Type):
    if isinstance(t, TBool):
        return False
    if isinstance(t, TInt):
        return t.lo
    if isinstance(t, TEnum):
        return t.members[0]
    if isinstance(t, TArray):
        return tuple(default_value(t.elem) for _ in range(array_positions(t)))
    if isinstance(t, TQueue):
        return ()
    raise TypeError(f"no default for {t}")


# ── flat model pieces ────────────────────────────────────────────


@dataclass(frozen=True)
class FlatVar:
    name: str
    type: Type
    mode: str  # local | in | out | share
    init: object
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class FlatTimer:
    name: str
    bound: int  # the declared b of `0..b`; values saturate at b+1
    init: int = 0
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class WriteSite:
    """One guarded write inside a variable projection.

    ``cond`` is the accumulated branch condition (None when unconditional),
    ``index`` the element expression for array targets, and exactly one of
    ``value`` (deterministic rhs) or ``demonic`` (finite draw domain) is set.
    ``demonic_array`` marks an elementwise draw over a whole array.
    """

    cond: ast.Expr | None
    index: ast.Expr | None
    value: ast.Expr | None
    demonic: tuple | None = None  # static tuple of drawable values
    demonic_array: bool = False
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class Projection:
    var: str
    sites: tuple[WriteSite, ...]


@dataclass(frozen=True)
class QueueEffect:
    """Queue mutation attached to an event action (FIFO semantics)."""

    var: str
    op: str  # Enqueue | Dequeue
    cond: ast.Expr | None
    arg: ast.Expr | None
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class FlatEvent:
    id: str
    f_ind: tuple[tuple[str, Type], ...]
    d_ind: tuple[tuple[str, Type], ...]
    lower: int
    upper: int | None  # None means unbounded
    fairness: str  # spontaneous | just | compassionate
    guard: ast.Expr
    start: tuple[str, ...]
    stop: tuple[str, ...]
    action: tuple[Projection, ...]
    queue_effects: tuple[QueueEffect, ...] = ()
    members: tuple[str, ...] = ()  # member event ids for compound events
    pos: Pos = field(default=NO_POS, compare=False)

    @property
    def guard_has_primes(self) -> bool:
        return _has_primes(self.guard)


def _has_primes(e: ast.Expr) -> bool:
    if isinstance(e, ast.PrimedName):
        return True
    if isinstance(e, ast.Unary):
        return _has_primes(e.operand)
    if isinstance(e, ast.Binary):
        return _has_primes(e.lhs) or _has_primes(e.rhs)
    if isinstance(e, ast.IndexExpr):
        return _has_primes(e.base) or _has_primes(e.index)
    if isinstance(e, ast.Fold):
        return _has_primes(e.body)
    if isinstance(e, ast.Call):
        return any(_has_primes(a) for a in e.args)
    return False


@dataclass
class DependencyGraphs:
    """The three graphs produced by composition analysis, kept for dumping."""

    module_nodes: tuple[str, ...]
    module_edges: tuple[tuple[str, str], ...]
    event_nodes: tuple[str, ...]
    event_edges: tuple[tuple[str, str], ...]
    sync_sets: tuple["SyncSetInfo", ...]


@dataclass
class SyncSetInfo:
    members: tuple[str, ...]  # qualified member event ids
    compound_name: str
    module_component: tuple[str, ...]


@dataclass
class FlatModel:
    """A flattened module instance: variables, initial state, timers, events."""

    variables: tuple[FlatVar, ...]
    timers: tuple[FlatTimer, ...]
    events: tuple[FlatEvent, ...]
    types: dict[str, Type]
    symbols: tuple[str, ...]  # symbol id -> name
    constants: dict[str, int]
    graphs: DependencyGraphs | None = None
    properties: tuple[tuple[str, str, Pos], ...] = ()  # (name, source, pos)

    def __post_init__(self):
        self.var_index = {v.name: k for k, v in enumerate(self.variables)}
        self.timer_index = {t.name: k for k, t in enumerate(self.timers)}
        self.event_index = {e.id: k for k, e in enumerate(self.events)}
        self.symbol_ids = {s: k for k, s in enumerate(self.symbols)}

    def var(self, name: str) -> FlatVar:
        return self.variables[self.var_index[name]]

    def event(self, eid: str) -> FlatEvent:
        return self.events[self.event_index[eid]]

    def symbol_name(self, sid: int) -> str:
        return self.symbols[sid]

    def initial_state(self) -> tuple:
        return tuple(v.init for v in self.variables)

    def initial_timers(self) -> tuple:
        return tuple(t.init for t in self.timers)

    def decode_value(self, t: Type, v):
        """Render a runtime value with symbols as their names."""
        if isinstance(t, TEnum):
            return self.symbols[v]
        if isinstance(t, TArray):
            return [self.decode_value(t.elem, x) for x in v]
        if isinstance(t, TQueue):
            return [self.decode_value(t.elem, x) for x in v]
        return v

    def encode_value(self, t: Type, v):
        """Inverse of decode_value for trace/server payloads."""
        if isinstance(t, TEnum):
            return self.symbol_ids[v]
        if isinstance(t, TArray):
            return tuple(self.encode_value(t.elem, x) for x in v)
        if isinstance(t, TQueue):
            return tuple(self.encode_value(t.elem, x) for x in v)
        return v
