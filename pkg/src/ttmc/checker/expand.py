"""Quantifier expansion and constant folding of LTL formulas.

``expand_quantifiers`` grounds a formula: forall/exists become finite
conjunctions/disjunctions over the declared set, event atoms without
demonic arguments expand to disjunctions over the demonic valuations, and
constant subformulas fold away (so trivially true instantiations such as
``t1 != t1`` disappear).
"""

from __future__ import annotations

from ttmc.diagnostics import Diagnostic, ParseError
from ttmc.elaborate import model as fm
from ttmc.syntax import ast
from ttmc.syntax.fold import fold_expr
from ttmc.syntax.ltl import (
    Formula, LAlways, LAnd, LAtom, LBool, LEvent, LEventually, LImplies,
    LMono, LNot, LOr, LQuant, LUntil, _substitute,
)


def _value_expr(model: fm.FlatModel, ty: fm.Type, v) -> ast.Expr:
    if isinstance(ty, fm.TEnum):
        return ast.Name(model.symbols[v])
    if isinstance(ty, fm.TBool):
        return ast.BoolLit(v)
    return ast.IntLit(v)


def _land(a: Formula, b: Formula) -> Formula:
    if isinstance(a, LBool):
        return b if a.value else a
    if isinstance(b, LBool):
        return a if b.value else b
    return LAnd(a, b)


def _lor(a: Formula, b: Formula) -> Formula:
    if isinstance(a, LBool):
        return a if a.value else b
    if isinstance(b, LBool):
        return b if b.value else a
    return LOr(a, b)


def expand_quantifiers(f: Formula, model: fm.FlatModel,
                       env: dict[str, ast.Expr] | None = None) -> Formula:
    env = env or {}
    if isinstance(f, LBool):
        return f
    if isinstance(f, LAtom):
        expr = fold_expr(_substitute(f.expr, env))
        if isinstance(expr, ast.BoolLit):
            return LBool(expr.value)
        return LAtom(expr)
    if isinstance(f, LMono):
        return f
    if isinstance(f, LEvent):
        return _expand_event(f, model, env)
    if isinstance(f, LNot):
        inner = expand_quantifiers(f.operand, model, env)
        if isinstance(inner, LBool):
            return LBool(not inner.value)
        return LNot(inner)
    if isinstance(f, LAnd):
        return _land(
            expand_quantifiers(f.lhs, model, env),
            expand_quantifiers(f.rhs, model, env),
        )
    if isinstance(f, LOr):
        return _lor(
            expand_quantifiers(f.lhs, model, env),
            expand_quantifiers(f.rhs, model, env),
        )
    if isinstance(f, LImplies):
        a = expand_quantifiers(f.lhs, model, env)
        b = expand_quantifiers(f.rhs, model, env)
        if isinstance(a, LBool):
            return b if a.value else LBool(True)
        if isinstance(b, LBool) and b.value:
            return LBool(True)
        return LImplies(a, b)
    if isinstance(f, LAlways):
        inner = expand_quantifiers(f.operand, model, env)
        return inner if isinstance(inner, LBool) and inner.value else LAlways(inner)
    if isinstance(f, LEventually):
        inner = expand_quantifiers(f.operand, model, env)
        return inner if isinstance(inner, LBool) and inner.value else LEventually(inner)
    if isinstance(f, LUntil):
        a = expand_quantifiers(f.lhs, model, env)
        b = expand_quantifiers(f.rhs, model, env)
        if isinstance(b, LBool):
            if b.value:
                return LBool(True)
            return LBool(False)  # p U false never discharges
        if isinstance(a, LBool):
            return LEventually(b) if a.value else b
        return LUntil(a, b)
    if isinstance(f, LQuant):
        if f.set_name not in model.types:
            raise ParseError(
                [Diagnostic("UnknownSet", f"unknown index set {f.set_name!r}")]
            )
        ty = model.types[f.set_name]
        if not isinstance(ty, (fm.TBool, fm.TInt, fm.TEnum)):
            raise ParseError(
                [Diagnostic("UnknownSet", f"{f.set_name!r} is not a finite scalar set")]
            )
        acc: Formula = LBool(f.kind == "forall")
        combine = _land if f.kind == "forall" else _lor
        for v in fm.finite_values(ty):
            env2 = dict(env)
            env2[f.var] = _value_expr(model, ty, v)
            acc = combine(acc, expand_quantifiers(f.body, model, env2))
        return acc
    raise TypeError(f"unknown formula node {f!r}")


def _expand_event(f: LEvent, model: fm.FlatModel, env: dict) -> Formula:
    if f.event not in model.event_index:
        raise ParseError(
            [Diagnostic("UnknownAtom", f"unknown event {f.event!r}", f.pos)]
        )
    ev = model.event(f.event)
    kinds = list(ev.f_ind) + list(ev.d_ind)
    values = []
    for arg, (_, ty) in zip(f.args, kinds):
        expr = fold_expr(_substitute(arg, env))
        v = _const_of(model, expr)
        if v is None:
            raise ParseError(
                [Diagnostic(
                    "UnknownAtom",
                    f"event atom arguments must be constant (in {f.event})",
                    f.pos,
                )]
            )
        values.append(v)
    nf = len(ev.f_ind)
    fair = tuple(values[:nf])
    if len(values) > nf:
        return LEvent(f.event, tuple(_value_expr(model, t, v)
                                     for v, (_, t) in zip(values, kinds)), pos=f.pos)
    # Missing demonic part: disjunction over all demonic valuations.
    import itertools

    dem_domains = [fm.finite_values(t) for _, t in ev.d_ind]
    if not dem_domains:
        return LEvent(
            f.event,
            tuple(_value_expr(model, t, v) for v, (_, t) in zip(fair, ev.f_ind)),
            pos=f.pos,
        )
    acc: Formula = LBool(False)
    for dem in itertools.product(*dem_domains):
        args = tuple(
            _value_expr(model, t, v)
            for v, (_, t) in zip(list(fair) + list(dem), kinds)
        )
        acc = _lor(acc, LEvent(f.event, args, pos=f.pos))
    return acc


def _const_of(model: fm.FlatModel, e: ast.Expr):
    if isinstance(e, ast.IntLit):
        return e.value
    if isinstance(e, ast.BoolLit):
        return e.value
    if isinstance(e, ast.Name) and e.name in model.symbol_ids:
        return model.symbol_ids[e.name]
    return None


def invariant_body(f: Formula) -> Formula | None:
    """If f is (a conjunction of) [] over temporal-free bodies, return the
    merged body; otherwise None.  Used to route to the reachability path."""
    bodies = []

    def visit(g: Formula) -> bool:
        if isinstance(g, LBool) and g.value:
            return True
        if isinstance(g, LAnd):
            return visit(g.lhs) and visit(g.rhs)
        if isinstance(g, LAlways):
            if _temporal_free(g.operand):
                bodies.append(g.operand)
                return True
        return False

    if not visit(f):
        return None
    if not bodies:
        return LBool(True)
    acc = bodies[0]
    for b in bodies[1:]:
        acc = LAnd(acc, b)
    return acc


def _temporal_free(f: Formula) -> bool:
    if isinstance(f, (LAlways, LEventually, LUntil)):
        return False
    if isinstance(f, (LAnd, LOr, LImplies)):
        return _temporal_free(f.lhs) and _temporal_free(f.rhs)
    if isinstance(f, LNot):
        return _temporal_free(f.operand)
    if isinstance(f, LQuant):
        return _temporal_free(f.body)
    return True
