"""Atom tables: mapping ground formula atoms to fast configuration predicates.

Atom kinds:
  * state atoms: boolean expressions over variables and timers,
  * mono(t): the monotonicity flag of a timer,
  * event atoms e(x, y): the last transition taken was that occurrence.

Hash (e#) configurations evaluate all event atoms to false; state and mono
atoms are observed at every configuration, including e# configurations.
"""

from __future__ import annotations

from dataclasses import dataclass

from ttmc.diagnostics import Diagnostic, NO_POS, ParseError
from ttmc.elaborate import model as fm
from ttmc.lts.engine import ExprCompiler, _Gen, _HELPERS, engine_for
from ttmc.syntax import ast
from ttmc.syntax.ltl import (
    Formula, LAlways, LAnd, LAtom, LBool, LEvent, LEventually, LImplies,
    LMono, LNot, LOr, LQuant, LUntil, walk,
)
from ttmc.syntax.pretty import pretty_expr


@dataclass
class Atom:
    key: str
    fn: object  # Configuration -> bool


class AtomTable:
    """Deduplicated atoms of one formula, with bitmask evaluation."""

    def __init__(self, model: fm.FlatModel):
        self.model = model
        self.engine = engine_for(model)
        self.atoms: list[Atom] = []
        self.by_key: dict[str, int] = {}

    def add(self, key: str, fn) -> int:
        if key in self.by_key:
            return self.by_key[key]
        self.by_key[key] = len(self.atoms)
        self.atoms.append(Atom(key, fn))
        return len(self.atoms) - 1

    def state_atom(self, expr: ast.Expr) -> int:
        key = pretty_expr(expr)
        if key in self.by_key:
            return self.by_key[key]
        cx = ExprCompiler(self.engine, {}, {})
        code, tag = cx.emit(expr)
        if tag.kind != "bool":
            raise ParseError(
                [Diagnostic("TypeError", f"atom {key!r} is not boolean",
                            getattr(expr, "pos", NO_POS))]
            )
        gen = _Gen()
        gen.w("def _atom(s, t):")
        gen.w(f"    return bool({code})")
        ns = dict(_HELPERS)
        ns.update(cx.ns)
        exec(gen.source(), ns)
        fn = ns["_atom"]
        return self.add(key, lambda k, _f=fn: _f(k[0], k[1]))

    def mono_atom(self, timer: str) -> int:
        if timer not in self.model.timer_index:
            raise ParseError(
                [Diagnostic("UnknownAtom", f"mono() of unknown timer {timer!r}")]
            )
        j = self.model.timer_index[timer]
        return self.add(f"mono({timer})", lambda k, _j=j: bool(k[2][_j]))

    def event_atom(self, f: LEvent) -> int:
        model = self.model
        if f.event not in model.event_index:
            raise ParseError(
                [Diagnostic("UnknownAtom", f"unknown event {f.event!r}", f.pos)]
            )
        ev = model.event(f.event)
        kinds = list(ev.f_ind) + list(ev.d_ind)
        if len(f.args) != len(kinds):
            raise ParseError(
                [Diagnostic("ArityError",
                            f"event atom {f.event!r} needs all index values "
                            "after expansion", f.pos)]
            )
        values = []
        for arg, (_, ty) in zip(f.args, kinds):
            v = _literal(model, arg)
            if v is None:
                raise ParseError(
                    [Diagnostic("UnknownAtom",
                                f"non-constant event atom argument in {f.event!r}",
                                f.pos)]
                )
            values.append(v)
        nf = len(ev.f_ind)
        fv = tuple(values[:nf])
        dem = tuple(values[nf:])
        ci = self.engine.clock_index.get((ev.id, fv))
        if ci is None:
            raise ParseError(
                [Diagnostic("UnknownAtom",
                            f"index valuation outside the declared sets for "
                            f"{f.event!r}", f.pos)]
            )
        key = f"taken:{ev.id}:{fv}:{dem}"
        target = ("e", ci, dem)
        return self.add(key, lambda k, _t=target: k[5] == _t)

    def evaluate(self, key) -> int:
        """Truth of every atom packed into a bitmask (key-tuple input)."""
        bits = 0
        for i, a in enumerate(self.atoms):
            if a.fn(key):
                bits |= 1 << i
        return bits


def _literal(model: fm.FlatModel, e: ast.Expr):
    if isinstance(e, ast.IntLit):
        return e.value
    if isinstance(e, ast.BoolLit):
        return e.value
    if isinstance(e, ast.Name) and e.name in model.symbol_ids:
        return model.symbol_ids[e.name]
    return None


def build_atoms(f: Formula, model: fm.FlatModel) -> tuple["AtomTable", Formula]:
    """Intern every atom of a ground formula; returns the table and the same
    formula with atoms replaced by indexed references."""
    table = AtomTable(model)

    def conv(g: Formula) -> Formula:
        if isinstance(g, LBool):
            return g
        if isinstance(g, LAtom):
            return _Ref(table.state_atom(g.expr))
        if isinstance(g, LMono):
            return _Ref(table.mono_atom(g.timer))
        if isinstance(g, LEvent):
            return _Ref(table.event_atom(g))
        if isinstance(g, LNot):
            return LNot(conv(g.operand))
        if isinstance(g, LAnd):
            return LAnd(conv(g.lhs), conv(g.rhs))
        if isinstance(g, LOr):
            return LOr(conv(g.lhs), conv(g.rhs))
        if isinstance(g, LImplies):
            return LImplies(conv(g.lhs), conv(g.rhs))
        if isinstance(g, LAlways):
            return LAlways(conv(g.operand))
        if isinstance(g, LEventually):
            return LEventually(conv(g.operand))
        if isinstance(g, LUntil):
            return LUntil(conv(g.lhs), conv(g.rhs))
        if isinstance(g, LQuant):
            raise ParseError(
                [Diagnostic("UnknownSet", "formula must be quantifier-expanded")]
            )
        raise TypeError(f"unknown formula {g!r}")

    return table, conv(f)


@dataclass(frozen=True)
class _Ref(Formula):
    """Atom reference by table index."""

    index: int

    def __str__(self):
        return f"a{self.index}"


AtomRef = _Ref


def atoms_of(model: fm.FlatModel, cfg, formula: Formula) -> dict[str, bool]:
    """Valuation of a ground formula's atoms at one configuration."""
    table, _ = build_atoms(formula, model)
    key = cfg.key() if hasattr(cfg, "key") else cfg
    return {a.key: bool(a.fn(key)) for a in table.atoms}


def eval_state_formula(f: Formula, table: AtomTable, key) -> bool:
    """Evaluate a temporal-operator-free formula at one configuration key."""
    if isinstance(f, LBool):
        return f.value
    if isinstance(f, AtomRef):
        return bool(table.atoms[f.index].fn(key))
    if isinstance(f, LNot):
        return not eval_state_formula(f.operand, table, key)
    if isinstance(f, LAnd):
        return eval_state_formula(f.lhs, table, key) and eval_state_formula(f.rhs, table, key)
    if isinstance(f, LOr):
        return eval_state_formula(f.lhs, table, key) or eval_state_formula(f.rhs, table, key)
    if isinstance(f, LImplies):
        return (not eval_state_formula(f.lhs, table, key)) or eval_state_formula(f.rhs, table, key)
    raise TypeError(f"not a state formula: {f!r}")
