"""AST for .ttm source files.

Positions are carried on every declaration and expression node but are
excluded from structural equality, so pretty-print/reparse round-trips
compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from ttmc.diagnostics import NO_POS, Pos


def _pos_field():
    return field(default=NO_POS, compare=False, repr=False)


# ── Expressions ──────────────────────────────────────────────────


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Name(Expr):
    """Identifier reference; may be dotted after flattening (``env.loc``)."""

    name: str
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class PrimedName(Expr):
    """Post-state reference ``v'``; legal on assignment right-hand sides."""

    name: str
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class IndexExpr(Expr):
    base: Expr
    index: Expr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # "!" or "-"
    operand: Expr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    lhs: Expr
    rhs: Expr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Fold(Expr):
    """Finite quantifier fold: ``(&& i : S @ body)`` or ``(|| i : S @ body)``."""

    op: str  # "&&" or "||"
    var: str
    set_type: "TypeExpr"
    body: Expr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Call(Expr):
    """Named predicate application ``call(f, e1, ...)``."""

    name: str
    args: tuple[Expr, ...]
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class QueueOp(Expr):
    """Pure queue query ``q.Count()`` or ``q.First()``."""

    target: str
    op: str
    pos: Pos = _pos_field()


# ── Type expressions ─────────────────────────────────────────────


@dataclass(frozen=True)
class TypeExpr:
    pass


@dataclass(frozen=True)
class BoolType(TypeExpr):
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class TypeName(TypeExpr):
    name: str
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class RangeType(TypeExpr):
    lo: Expr
    hi: Expr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class EnumType(TypeExpr):
    """Explicit finite value list; members are symbols or integers."""

    members: tuple[Expr, ...]
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class ArrayType(TypeExpr):
    index: TypeExpr
    elem: TypeExpr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class QueueType(TypeExpr):
    elem: TypeExpr
    capacity: Expr
    pos: Pos = _pos_field()


# ── Statements ───────────────────────────────────────────────────


@dataclass(frozen=True)
class Stmt:
    pass


@dataclass(frozen=True)
class Assign(Stmt):
    target: Expr  # Name or IndexExpr over a Name
    value: Expr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class DemonicAssign(Stmt):
    """``v :: 1 .. 4`` / ``v :: { a, b }`` / ``arr :: array T``."""

    target: Expr
    choice: "DemonicRange"
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class DemonicRange:
    """Finite draw domain: an int range, an explicit set, a type name,
    or elementwise over an array (``array`` flag)."""

    elem: TypeExpr
    array: bool = False
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class IfStmt(Stmt):
    branches: tuple[tuple[Expr, tuple[Stmt, ...]], ...]
    orelse: tuple[Stmt, ...]
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class SkipStmt(Stmt):
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class QueueStmt(Stmt):
    """Mutating queue statement ``q.Enqueue(e)`` / ``q.Dequeue()``."""

    target: str
    op: str
    arg: Expr | None
    pos: Pos = _pos_field()


# ── Declarations ─────────────────────────────────────────────────


@dataclass(frozen=True)
class TypeDecl:
    name: str
    type: TypeExpr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class ConstDecl:
    name: str
    value: Expr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: TypeExpr
    init: Expr | None
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class TimerDecl:
    name: str
    bound: Expr
    init: Expr | None = None
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class ParamDecl:
    mode: str  # in | out | share
    name: str
    type: TypeExpr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class DependsDecl:
    slot: str
    module: str
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class DefineDecl:
    name: str
    params: tuple[tuple[str, TypeExpr], ...]
    body: Expr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class IndexDecl:
    name: str
    fair: bool
    type: TypeExpr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class SyncClause:
    targets: tuple[tuple[str, str], ...]  # (depends-slot, event-name)
    as_name: str
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class EventDecl:
    name: str
    indices: tuple[IndexDecl, ...]
    bounds: tuple[Expr, Expr | None] | None  # None: no clause; (l, None): [l,*]
    fairness: str  # spontaneous | just | compassionate
    sync: SyncClause | None
    guard: Expr | None
    start: tuple[str, ...]
    stop: tuple[str, ...]
    action: tuple[Stmt, ...]
    pos: Pos = _pos_field()

    @property
    def fair_indices(self) -> tuple[IndexDecl, ...]:
        return tuple(ix for ix in self.indices if ix.fair)

    @property
    def demonic_indices(self) -> tuple[IndexDecl, ...]:
        return tuple(ix for ix in self.indices if not ix.fair)


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    params: tuple[ParamDecl, ...]
    depends: tuple[DependsDecl, ...]
    locals: tuple[VarDecl, ...]
    timers: tuple[TimerDecl, ...]
    defines: tuple[DefineDecl, ...]
    events: tuple[EventDecl, ...]
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class InstanceArg:
    mode: str
    value: Expr  # lvalue (Name / IndexExpr) or plain value for `in`
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class InstanceDecl:
    name: str
    module: str
    args: tuple[InstanceArg, ...]
    with_bindings: tuple[tuple[str, str], ...]  # (depends-slot, instance)
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class RenameDecl:
    """``new ::= a || b``: names the synchronized group of instances."""

    name: str
    instances: tuple[str, ...]
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class CompExpr:
    pass


@dataclass(frozen=True)
class CompName(CompExpr):
    name: str
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class CompPar(CompExpr):
    left: CompExpr
    right: CompExpr
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class CompIter(CompExpr):
    """``|| i : S @ Module(args)``: iterated composition of instances."""

    var: str
    set_type: TypeExpr
    module: str
    args: tuple[InstanceArg, ...]
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class PropertyDecl:
    name: str
    source: str  # raw formula text, parsed later against the flat model
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class SourceModel:
    types: tuple[TypeDecl, ...]
    constants: tuple[ConstDecl, ...]
    globals: tuple[VarDecl, ...]
    defines: tuple[DefineDecl, ...]
    modules: tuple[ModuleDecl, ...]
    instances: tuple[InstanceDecl, ...]
    renames: tuple[RenameDecl, ...]
    system: CompExpr | None
    properties: tuple[PropertyDecl, ...]

    def module(self, name: str) -> ModuleDecl | None:
        for m in self.modules:
            if m.name == name:
                return m
        return None

    def instance(self, name: str) -> InstanceDecl | None:
        for i in self.instances:
            if i.name == name:
                return i
        return None
