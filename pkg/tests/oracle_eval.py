"""Independent tree-walking evaluation used by the semantics oracle tests.

This deliberately shares no code with the compiled engine: expressions are
interpreted directly over configuration keys, and guard satisfaction is
decided by explicit enumeration of the demonic index domains.
"""

from __future__ import annotations

import itertools

from ttmc.elaborate import model as fm
from ttmc.syntax import ast


def eval_expr(model: fm.FlatModel, e: ast.Expr, s: tuple, t: tuple,
              env: dict[str, object]):
    if isinstance(e, ast.IntLit):
        return e.value
    if isinstance(e, ast.BoolLit):
        return e.value
    if isinstance(e, ast.Name):
        if e.name in env:
            return env[e.name]
        if e.name in model.var_index:
            return s[model.var_index[e.name]]
        if e.name in model.timer_index:
            return t[model.timer_index[e.name]]
        if e.name in model.symbol_ids:
            return model.symbol_ids[e.name]
        raise KeyError(e.name)
    if isinstance(e, ast.PrimedName):
        raise AssertionError("oracle evaluation never sees primed guards")
    if isinstance(e, ast.IndexExpr):
        base_var = e.base
        assert isinstance(base_var, ast.Name)
        arr = eval_expr(model, base_var, s, t, env)
        vtype = model.var(base_var.name).type
        idx = eval_expr(model, e.index, s, t, env)
        if isinstance(vtype.index, fm.TInt):
            return arr[idx - vtype.index.lo]
        return arr[list(vtype.index.members).index(idx)]
    if isinstance(e, ast.Unary):
        v = eval_expr(model, e.operand, s, t, env)
        return (not v) if e.op == "!" else -v
    if isinstance(e, ast.Binary):
        a = eval_expr(model, e.lhs, s, t, env)
        if e.op == "&&":
            return bool(a) and bool(eval_expr(model, e.rhs, s, t, env))
        if e.op == "||":
            return bool(a) or bool(eval_expr(model, e.rhs, s, t, env))
        if e.op == "=>":
            return (not a) or bool(eval_expr(model, e.rhs, s, t, env))
        b = eval_expr(model, e.rhs, s, t, env)
        return {
            "==": lambda: a == b, "!=": lambda: a != b,
            "<": lambda: a < b, "<=": lambda: a <= b,
            ">": lambda: a > b, ">=": lambda: a >= b,
            "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
            "/": lambda: a // b, "mod": lambda: a % b,
        }[e.op]()
    if isinstance(e, ast.Fold):
        ty = _resolve_type(model, e.set_type)
        values = fm.finite_values(ty)
        results = []
        for v in values:
            env2 = dict(env)
            env2[e.var] = v
            results.append(bool(eval_expr(model, e.body, s, t, env2)))
        return all(results) if e.op == "&&" else any(results)
    if isinstance(e, ast.QueueOp):
        q = s[model.var_index[e.target]]
        if e.op == "Count":
            return len(q)
        assert q, "First() on an empty queue"
        return q[0]
    raise TypeError(f"cannot evaluate {e!r}")


def _resolve_type(model: fm.FlatModel, te: ast.TypeExpr) -> fm.Type:
    if isinstance(te, ast.TypeName):
        return model.types[te.name]
    if isinstance(te, ast.BoolType):
        return fm.TBool()
    if isinstance(te, ast.RangeType):
        lo = _const(model, te.lo)
        hi = _const(model, te.hi)
        return fm.TInt(lo, hi)
    raise TypeError(te)


def _const(model: fm.FlatModel, e: ast.Expr) -> int:
    if isinstance(e, ast.IntLit):
        return e.value
    if isinstance(e, ast.Name):
        return model.constants[e.name]
    raise TypeError(e)


def guard_exists(model: fm.FlatModel, ev: fm.FlatEvent, s: tuple, t: tuple,
                 fair_vals: tuple) -> bool:
    """Guard satisfiability (exists y . grd(x, y)) by explicit enumeration
    over the demonic index domains."""
    env = {name: v for (name, _), v in zip(ev.f_ind, fair_vals)}
    dem_domains = [fm.finite_values(ty) for _, ty in ev.d_ind]
    for dem in itertools.product(*dem_domains) if dem_domains else [()]:
        env2 = dict(env)
        for (name, _), v in zip(ev.d_ind, dem):
            env2[name] = v
        if bool(eval_expr(model, ev.guard, s, t, env2)):
            return True
    return False
