"""Compilation of a FlatModel into fast Python step functions.

Each event's guard and action compile to exec'd Python functions over flat
state tuples, so exploration avoids tree-walking the AST in the hot path.
All enumeration orders (fair valuations, demonic valuations, draw domains)
are fixed and deterministic.

State layout:
  s : tuple of variable values (scalars; arrays and queues as tuples)
  t : tuple of timer values
  m : tuple of timer monotonicity booleans
  c : tuple of implicit clocks, one per (event, fair valuation)
  x : pending clock-entry index or None
  p : last transition, ('e', ci, dem) | ('h', ci) | 'tick' | None
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ttmc.diagnostics import Diagnostic, NO_POS, SemanticsError
from ttmc.elaborate import model as fm
from ttmc.syntax import ast


class EvalError(Exception):
    """Runtime model error inside compiled code (empty dequeue, range
    violation, double element write)."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


# ── runtime helpers injected into compiled code ──────────────────


def _rng(v, lo, hi, name):
    if lo <= v <= hi:
        return v
    raise EvalError("EvaluationError", f"value {v} of {name!r} outside {lo}..{hi}")


def _api(v, lo, hi, name):
    if lo <= v <= hi:
        return v - lo
    raise EvalError("EvaluationError", f"index {v} of {name!r} outside {lo}..{hi}")


def _eix(mapping, v, name):
    p = mapping.get(v, -1)
    if p < 0:
        raise EvalError("EvaluationError", f"index value not in the index type of {name!r}")
    return p


def _qfirst(q, name):
    if not q:
        raise EvalError("EvaluationError", f"First() on empty queue {name!r}")
    return q[0]


def _qenq(q, v, cap, name):
    if len(q) >= cap:
        raise EvalError("EvaluationError", f"Enqueue() on full queue {name!r} (capacity {cap})")
    return q + (v,)


def _qdeq(q, name):
    if not q:
        raise EvalError("EvaluationError", f"Dequeue() on empty queue {name!r}")
    return q[1:]


def _dupidx(positions, name):
    if len(positions) != len(set(positions)):
        raise EvalError(
            "DoubleAssignment", f"two writes target the same element of {name!r}"
        )


class _Skip:
    __slots__ = ()

    def __repr__(self):
        return "<skip>"


_SKIP = _Skip()

_HELPERS = {
    "_rng": _rng, "_api": _api, "_eix": _eix,
    "_qfirst": _qfirst, "_qenq": _qenq, "_qdeq": _qdeq,
    "_dupidx": _dupidx, "_SKIP": _SKIP, "product": itertools.product,
}


# ── expression compilation ───────────────────────────────────────


@dataclass(frozen=True)
class _Tag:
    kind: str  # int | bool | enum | queue | array
    members: frozenset | None = None
    lo: int | None = None
    hi: int | None = None
    elem: "_Tag | None" = None
    index: fm.Type | None = None


def _tag_of(t: fm.Type) -> _Tag:
    if isinstance(t, fm.TBool):
        return _Tag("bool")
    if isinstance(t, fm.TInt):
        return _Tag("int", lo=t.lo, hi=t.hi)
    if isinstance(t, fm.TEnum):
        return _Tag("enum", members=frozenset(t.members))
    if isinstance(t, fm.TArray):
        return _Tag("array", elem=_tag_of(t.elem), index=t.index)
    if isinstance(t, fm.TQueue):
        return _Tag("queue", elem=_tag_of(t.elem), lo=0, hi=t.capacity)
    raise TypeError(t)


class ExprCompiler:
    """Compile resolved expressions to Python source over (s, t, ...) args."""

    def __init__(self, engine: "Engine", index_env: dict[str, tuple[str, fm.Type]],
                 primed_locals: dict[str, str]):
        self.eng = engine
        self.index_env = index_env  # index name -> (py name, type)
        self.primed = primed_locals  # var name -> local py name holding post value
        self.ns: dict[str, object] = {}
        self._kcount = 0

    def const(self, value) -> str:
        self._kcount += 1
        key = f"_K{id(self)%997}_{self._kcount}"
        self.ns[key] = value
        return key

    def emit(self, e: ast.Expr) -> tuple[str, _Tag]:
        eng = self.eng
        if isinstance(e, ast.IntLit):
            return repr(e.value), _Tag("int", lo=e.value, hi=e.value)
        if isinstance(e, ast.BoolLit):
            return repr(e.value), _Tag("bool")
        if isinstance(e, ast.Name):
            return self._name(e.name, primed=False)
        if isinstance(e, ast.PrimedName):
            return self._name(e.name, primed=True)
        if isinstance(e, ast.IndexExpr):
            base_code, base_tag = self.emit(e.base)
            if base_tag.kind != "array":
                raise SemanticsError(
                    [Diagnostic("TypeError", "indexing a non-array value", e.pos)]
                )
            pos_code = self.position(e.index, base_tag.index, _describe(e.base))
            return f"{base_code}[{pos_code}]", base_tag.elem
        if isinstance(e, ast.Unary):
            code, tag = self.emit(e.operand)
            if e.op == "!":
                return f"(not {code})", _Tag("bool")
            lo = None if tag.lo is None else -tag.hi
            hi = None if tag.hi is None else -tag.lo
            return f"(-{code})", _Tag("int", lo=lo, hi=hi)
        if isinstance(e, ast.Binary):
            return self._binary(e)
        if isinstance(e, ast.Fold):
            ty = self.eng.resolve_type_cached(e.set_type)
            values = tuple(fm.finite_values(ty))
            saved = self.index_env.get(e.var)
            if len(values) <= 8:
                # Unroll: substituting each value avoids a generator per
                # evaluation in hot action code.
                parts = []
                for v in values:
                    self.index_env[e.var] = (repr(v), ty)
                    body, _ = self.emit(e.body)
                    parts.append(body)
                joiner = " and " if e.op == "&&" else " or "
                code = "(" + joiner.join(parts) + ")"
            else:
                dom = self.const(values)
                py = self.fresh_index(e.var)
                self.index_env[e.var] = (py, ty)
                body, _ = self.emit(e.body)
                fn = "all" if e.op == "&&" else "any"
                code = f"{fn}({body} for {py} in {dom})"
            if saved is None:
                self.index_env.pop(e.var, None)
            else:
                self.index_env[e.var] = saved
            return code, _Tag("bool")
        if isinstance(e, ast.QueueOp):
            code, tag = self._name(e.target, primed=False)
            if tag.kind != "queue":
                raise SemanticsError(
                    [Diagnostic("TypeError", f"{e.target!r} is not a queue", e.pos)]
                )
            if e.op == "Count":
                return f"len({code})", _Tag("int", lo=0, hi=tag.hi)
            return f"_qfirst({code}, {e.target!r})", tag.elem
        raise TypeError(f"cannot compile {e!r}")

    def _binary(self, e: ast.Binary) -> tuple[str, _Tag]:
        a, ta = self.emit(e.lhs)
        b, tb = self.emit(e.rhs)
        op = e.op
        if op == "&&":
            return f"({a} and {b})", _Tag("bool")
        if op == "||":
            return f"({a} or {b})", _Tag("bool")
        if op == "=>":
            return f"((not {a}) or {b})", _Tag("bool")
        if op in ("==", "!="):
            return f"({a} {op} {b})", _Tag("bool")
        if op in ("<", "<=", ">", ">="):
            return f"({a} {op} {b})", _Tag("bool")
        lo = hi = None
        if ta.lo is not None and tb.lo is not None:
            if op == "+":
                lo, hi = ta.lo + tb.lo, ta.hi + tb.hi
            elif op == "-":
                lo, hi = ta.lo - tb.hi, ta.hi - tb.lo
            elif op == "*":
                prods = [ta.lo * tb.lo, ta.lo * tb.hi, ta.hi * tb.lo, ta.hi * tb.hi]
                lo, hi = min(prods), max(prods)
            elif op == "mod" and tb.lo > 0:
                lo, hi = 0, tb.hi - 1
        pyop = {"+": "+", "-": "-", "*": "*", "/": "//", "mod": "%"}[op]
        return f"({a} {pyop} {b})", _Tag("int", lo=lo, hi=hi)

    def _name(self, name: str, primed: bool) -> tuple[str, _Tag]:
        eng = self.eng
        if name in self.index_env:
            py, ty = self.index_env[name]
            return py, _tag_of(ty)
        if name in eng.model.var_index:
            i = eng.model.var_index[name]
            tag = _tag_of(eng.model.variables[i].type)
            if primed and name in self.primed:
                return self.primed[name], tag
            return f"s[{i}]", tag
        if name in eng.model.timer_index:
            j = eng.model.timer_index[name]
            bound = eng.model.timers[j].bound
            return f"t[{j}]", _Tag("int", lo=0, hi=bound + 1)
        if name in eng.model.symbol_ids:
            sid = eng.model.symbol_ids[name]
            return repr(sid), _Tag("enum", members=frozenset({sid}))
        raise SemanticsError(
            [Diagnostic("UnknownReference", f"uncompilable name {name!r}", NO_POS)]
        )

    def fresh_index(self, name: str) -> str:
        self._kcount += 1
        return f"_q{self._kcount}_{_san(name)}"

    def position(self, index_expr: ast.Expr, index_type: fm.Type, owner: str) -> str:
        """Compile an array index expression to a tuple position."""
        code, tag = self.emit(index_expr)
        if isinstance(index_type, fm.TInt):
            lo, hi = index_type.lo, index_type.hi
            if tag.lo is not None and tag.lo >= lo and tag.hi <= hi:
                return code if lo == 0 else f"({code} - {lo})"
            return f"_api({code}, {lo}, {hi}, {owner!r})"
        assert isinstance(index_type, fm.TEnum)
        posmap = self.eng.enum_posmap(index_type)
        mkey = self.const(posmap)
        if tag.members is not None and tag.members <= frozenset(index_type.members):
            return f"{mkey}[{code}]"
        return f"_eix({mkey}, {code}, {owner!r})"


def _describe(e: ast.Expr) -> str:
    if isinstance(e, (ast.Name, ast.PrimedName)):
        return e.name
    return "<expr>"


def _san(name: str) -> str:
    return "".join(ch if ch.isalnum() else "_" for ch in name)


# ── per-event compilation ────────────────────────────────────────


@dataclass
class CompiledEvent:
    idx: int
    id: str
    lower: int
    upper: int | None
    fairness: str
    start_pos: tuple[int, ...]
    stop_pos: tuple[int, ...]
    fair_domains: tuple[tuple, ...]
    dem_domains: tuple[tuple, ...]
    fair_valuations: tuple[tuple, ...]
    clock_base: int
    guard_any: object  # fn(s, t, *fair) -> bool
    dem_feasible: object  # fn(s, t, *fair) -> list of demonic valuations
    successors: object  # fn(s, t, *fair) -> list[(dem, draws, s1)]
    has_primed_guard: bool

    @property
    def clock_cap(self) -> int:
        # Clocks of unbounded events saturate at l+1; bounded ones stop at u
        # because tick is blocked at the bound.
        return self.upper if self.upper is not None else self.lower + 1


class _Gen:
    """Tiny indented source builder."""

    def __init__(self):
        self.lines: list[str] = []
        self.indent = 0

    def w(self, text: str):
        self.lines.append("    " * self.indent + text)

    def source(self) -> str:
        return "\n".join(self.lines)


class Engine:
    def __init__(self, model: fm.FlatModel):
        self.model = model
        self._posmaps: dict[tuple, dict] = {}
        self.events: list[CompiledEvent] = []
        clock_entries: list[tuple[int, tuple]] = []
        for k, ev in enumerate(model.events):
            domains = tuple(tuple(fm.finite_values(t)) for _, t in ev.f_ind)
            base = len(clock_entries)
            vals = tuple(itertools.product(*domains)) if domains else ((),)
            for fv in vals:
                clock_entries.append((k, fv))
            self.events.append(self._compile_event(k, ev, base, domains, vals))
        self.clock_entries = tuple(clock_entries)
        self.clock_index = {
            (self.events[ei].id, fv): ci
            for ci, (ei, fv) in enumerate(clock_entries)
        }
        self.timer_bounds = tuple(t.bound for t in model.timers)
        self.s0 = model.initial_state()
        self.t0 = model.initial_timers()

    # ── shared lookups ──────────────────────────────────────────

    def enum_posmap(self, t: fm.TEnum) -> dict:
        key = t.members
        if key not in self._posmaps:
            self._posmaps[key] = {v: i for i, v in enumerate(t.members)}
        return self._posmaps[key]

    def resolve_type_cached(self, te: ast.TypeExpr) -> fm.Type:
        if isinstance(te, ast.TypeName):
            return self.model.types[te.name]
        if isinstance(te, ast.BoolType):
            return fm.TBool()
        if isinstance(te, ast.RangeType):
            return fm.TInt(self._cint(te.lo), self._cint(te.hi))
        raise TypeError(f"unsupported inline type {te!r}")

    def _cint(self, e: ast.Expr) -> int:
        if isinstance(e, ast.IntLit):
            return e.value
        if isinstance(e, ast.Name) and e.name in self.model.constants:
            return self.model.constants[e.name]
        if isinstance(e, ast.Unary) and e.op == "-":
            return -self._cint(e.operand)
        if isinstance(e, ast.Binary):
            a, b = self._cint(e.lhs), self._cint(e.rhs)
            return {"+": a + b, "-": a - b, "*": a * b, "/": a // b if b else 0,
                    "mod": a % b if b else 0}[e.op]
        raise TypeError(f"non-constant bound {e!r}")

    # ── event compilation ───────────────────────────────────────

    def _compile_event(self, idx: int, ev: fm.FlatEvent, clock_base: int,
                       fair_domains, fair_valuations) -> CompiledEvent:
        model = self.model
        fair_names = [f"x{k}_{_san(n)}" for k, (n, _) in enumerate(ev.f_ind)]
        dem_names = [f"y{k}_{_san(n)}" for k, (n, _) in enumerate(ev.d_ind)]
        dem_domains = tuple(tuple(fm.finite_values(t)) for _, t in ev.d_ind)

        index_env = {
            n: (fair_names[k], t) for k, (n, t) in enumerate(ev.f_ind)
        }
        index_env.update(
            {n: (dem_names[k], t) for k, (n, t) in enumerate(ev.d_ind)}
        )

        assigned = {p.var for p in ev.action} | {q.var for q in ev.queue_effects}
        primed_locals = {
            v: f"_n{model.var_index[v]}_{_san(v)}" for v in assigned
        }
        cx = ExprCompiler(self, dict(index_env), primed_locals)

        guard_primed = ev.guard_has_primes
        # Guard without access to post-state locals (used when prime-free).
        cx_guard = ExprCompiler(self, dict(index_env), {})
        guard_code = None
        if not guard_primed:
            guard_code, gtag = cx_guard.emit(ev.guard)

        gen = _Gen()
        args = ", ".join(["s", "t"] + fair_names)
        gen.w(f"def _succ({args}):")
        gen.indent += 1
        gen.w("out = []")
        gen.w("ap = out.append")
        for k, dom in enumerate(dem_domains):
            gen.w(f"for {dem_names[k]} in {cx.const(dom)}:")
            gen.indent += 1
        if guard_code is not None:
            gen.w(f"if ({guard_code}):")
            gen.indent += 1
        draw_vars: list[tuple[str, bool]] = []  # (py var, may_skip)
        self._emit_projections(gen, cx, ev, draw_vars)
        self._emit_queue_effects(gen, cx, ev)
        if guard_primed:
            gcode, _ = cx.emit(ev.guard)
            gen.w(f"if ({gcode}):")
            gen.indent += 1
        dem_tuple = _tuple_code(dem_names)
        draws = [
            f"(None if {v} is _SKIP else {v})" if skip else v
            for v, skip in draw_vars
        ]
        draws_tuple = _tuple_code(draws)
        parts = []
        for v in model.variables:
            parts.append(primed_locals.get(v.name, f"s[{model.var_index[v.name]}]"))
        gen.w(f"ap(({dem_tuple}, {draws_tuple}, {_tuple_code(parts)}))")
        gen.indent = 1
        gen.w("return out")

        ns = dict(_HELPERS)
        ns.update(cx.ns)
        ns.update(cx_guard.ns)
        exec(gen.source(), ns)
        succ_fn = ns["_succ"]

        # guard_any / dem_feasible
        if guard_primed:
            def guard_any(s, t, *fair, _f=succ_fn):
                return bool(_f(s, t, *fair))

            def dem_feasible(s, t, *fair, _f=succ_fn):
                seen, out = set(), []
                for dem, _, _ in _f(s, t, *fair):
                    if dem not in seen:
                        seen.add(dem)
                        out.append(dem)
                return out
        else:
            g2 = _Gen()
            g2.w(f"def _gany({args}):")
            g2.indent += 1
            if dem_names:
                for k, dom in enumerate(dem_domains):
                    g2.w(f"for {dem_names[k]} in {cx_guard.const(dom)}:")
                    g2.indent += 1
                g2.w(f"if ({guard_code}):")
                g2.w("    return True")
                g2.indent = 1
                g2.w("return False")
            else:
                g2.w(f"return bool({guard_code})")
            g3 = _Gen()
            g3.w(f"def _dems({args}):")
            g3.indent += 1
            g3.w("out = []")
            for k, dom in enumerate(dem_domains):
                g3.w(f"for {dem_names[k]} in {cx_guard.const(dom)}:")
                g3.indent += 1
            g3.w(f"if ({guard_code}):")
            g3.w(f"    out.append({_tuple_code(dem_names)})")
            g3.indent = 1
            g3.w("return out")
            ns2 = dict(_HELPERS)
            ns2.update(cx_guard.ns)
            exec(g2.source(), ns2)
            exec(g3.source(), ns2)
            guard_any = ns2["_gany"]
            dem_feasible = ns2["_dems"]

        return CompiledEvent(
            idx=idx,
            id=ev.id,
            lower=ev.lower,
            upper=ev.upper,
            fairness=ev.fairness,
            start_pos=tuple(model.timer_index[n] for n in ev.start),
            stop_pos=tuple(model.timer_index[n] for n in ev.stop),
            fair_domains=fair_domains,
            dem_domains=dem_domains,
            fair_valuations=fair_valuations,
            clock_base=clock_base,
            guard_any=guard_any,
            dem_feasible=dem_feasible,
            successors=succ_fn,
            has_primed_guard=guard_primed,
        )

    # ── projection codegen ──────────────────────────────────────

    def _emit_projections(self, gen: _Gen, cx: ExprCompiler, ev: fm.FlatEvent,
                          draw_vars: list):
        model = self.model
        for proj in ev.action:
            var = model.var(proj.var)
            vi = model.var_index[proj.var]
            local = f"_n{vi}_{_san(proj.var)}"
            if isinstance(var.type, fm.TArray):
                self._emit_array_proj(gen, cx, proj, var, vi, local, draw_vars)
            else:
                self._emit_scalar_proj(gen, cx, proj, var, vi, local, draw_vars)

    def _checked_rhs(self, cx: ExprCompiler, value: ast.Expr, vtype: fm.Type,
                     name: str) -> str:
        code, tag = cx.emit(value)
        if isinstance(vtype, fm.TInt):
            if tag.lo is None or tag.lo < vtype.lo or tag.hi > vtype.hi:
                return f"_rng({code}, {vtype.lo}, {vtype.hi}, {name!r})"
        return code

    def _emit_scalar_proj(self, gen, cx, proj, var, vi, local, draw_vars):
        sites = proj.sites
        has_dem = any(s.demonic is not None for s in sites)
        if not has_dem:
            if len(sites) == 1 and sites[0].cond is None:
                rhs = self._checked_rhs(cx, sites[0].value, var.type, var.name)
                gen.w(f"{local} = {rhs}")
                return
            first = True
            for s in sites:
                cond, _ = cx.emit(s.cond)
                rhs = self._checked_rhs(cx, s.value, var.type, var.name)
                gen.w(f"{'if' if first else 'elif'} {cond}:")
                gen.w(f"    {local} = {rhs}")
                first = False
            gen.w("else:")
            gen.w(f"    {local} = s[{vi}]")
            return
        # At least one demonic site: one candidate loop selects the domain.
        dv = f"_d{len(draw_vars)}_{_san(var.name)}"
        if len(sites) == 1 and sites[0].cond is None:
            dom = cx.const(tuple(sites[0].demonic))
            gen.w(f"for {dv} in {dom}:")
            gen.indent += 1
            gen.w(f"{local} = {dv}")
            draw_vars.append((dv, False))
            return
        sel_parts = []
        for s in sites:
            if s.demonic is not None:
                cand = cx.const(tuple(s.demonic))
            else:
                rhs = self._checked_rhs(cx, s.value, var.type, var.name)
                cand = f"({rhs},)"
            if s.cond is None:
                sel_parts.append(cand)
                break
            cond, _ = cx.emit(s.cond)
            sel_parts.append(f"{cand} if {cond} else")
        else:
            sel_parts.append("(_SKIP,)")
        selector = " ".join(sel_parts)
        gen.w(f"for {dv} in ({selector}):")
        gen.indent += 1
        gen.w(f"{local} = s[{vi}] if {dv} is _SKIP else {dv}")
        draw_vars.append((dv, True))

    def _emit_array_proj(self, gen, cx, proj, var, vi, local, draw_vars):
        sites = proj.sites
        whole = [s for s in sites if s.demonic_array]
        if whole:
            if len(sites) != 1:
                raise SemanticsError(
                    [Diagnostic(
                        "DoubleAssignment",
                        f"whole-array demonic assignment to {var.name!r} "
                        "cannot be combined with other writes",
                        sites[0].pos,
                    )]
                )
            site = whole[0]
            n = fm.array_positions(var.type)
            dom = cx.const(tuple(site.demonic))
            if site.cond is None:
                elems = []
                for k in range(n):
                    dv = f"_d{len(draw_vars)}_{_san(var.name)}"
                    gen.w(f"for {dv} in {dom}:")
                    gen.indent += 1
                    elems.append(dv)
                    draw_vars.append((dv, False))
                gen.w(f"{local} = {_tuple_code(elems)}")
            else:
                cond, _ = cx.emit(site.cond)
                dv = f"_d{len(draw_vars)}_{_san(var.name)}"
                gen.w(f"for {dv} in (product({dom}, repeat={n}) if {cond} else (_SKIP,)):")
                gen.indent += 1
                gen.w(f"{local} = s[{vi}] if {dv} is _SKIP else {dv}")
                draw_vars.append((dv, True))
            return
        lst = f"_l{vi}_{_san(var.name)}"
        gen.w(f"{lst} = list(s[{vi}])")
        need_dup = len(sites) > 1 and not self._static_positions_distinct(
            sites, var.type.index
        )
        wlist = f"_w{vi}_{_san(var.name)}"
        if need_dup:
            gen.w(f"{wlist} = []")
        det_sites = [s for s in sites if s.demonic is None]
        dem_sites = [s for s in sites if s.demonic is not None]
        for s in det_sites:
            pos = cx.position(s.index, var.type.index, var.name)
            rhs = self._checked_rhs(cx, s.value, var.type.elem, var.name)
            body = gen
            if s.cond is not None:
                cond, _ = cx.emit(s.cond)
                gen.w(f"if {cond}:")
                gen.indent += 1
            gen.w(f"_p = {pos}")
            gen.w(f"{lst}[_p] = {rhs}")
            if need_dup:
                gen.w(f"{wlist}.append(_p)")
            if s.cond is not None:
                gen.indent -= 1
        for s in dem_sites:
            dom = cx.const(tuple(s.demonic))
            dv = f"_d{len(draw_vars)}_{_san(var.name)}"
            if s.cond is None:
                gen.w(f"for {dv} in {dom}:")
                gen.indent += 1
                draw_vars.append((dv, False))
            else:
                cond, _ = cx.emit(s.cond)
                gen.w(f"for {dv} in ({dom} if {cond} else (_SKIP,)):")
                gen.indent += 1
                draw_vars.append((dv, True))
            pos = cx.position(s.index, var.type.index, var.name)
            gen.w(f"{lst} = list({lst})")  # fresh copy per draw iteration
            gen.w(f"if {dv} is not _SKIP:")
            gen.w(f"    _p = {pos}")
            gen.w(f"    {lst}[_p] = {dv}")
            if need_dup:
                gen.w(f"    {wlist}.append(_p)")
        if need_dup:
            gen.w(f"_dupidx({wlist}, {var.name!r})")
        gen.w(f"{local} = tuple({lst})")

    def _static_positions_distinct(self, sites, index_type: fm.Type) -> bool:
        positions = []
        for site in sites:
            pos = self._static_position(site.index, index_type)
            if pos is None:
                return False
            positions.append(pos)
        return len(set(positions)) == len(positions)

    def _static_position(self, index_expr, index_type: fm.Type):
        if isinstance(index_expr, ast.IntLit) and isinstance(index_type, fm.TInt):
            if index_type.lo <= index_expr.value <= index_type.hi:
                return index_expr.value - index_type.lo
            return None
        if isinstance(index_expr, ast.Name) and isinstance(index_type, fm.TEnum):
            sid = self.model.symbol_ids.get(index_expr.name)
            if sid in index_type.members:
                return list(index_type.members).index(sid)
        return None

    def _emit_queue_effects(self, gen, cx, ev: fm.FlatEvent):
        model = self.model
        by_var: dict[str, list] = {}
        for q in ev.queue_effects:
            by_var.setdefault(q.var, []).append(q)
        for var, ops in by_var.items():
            vi = model.var_index[var]
            vtype = model.var(var).type
            local = f"_n{vi}_{_san(var)}"
            gen.w(f"{local} = s[{vi}]")
            for q in ops:
                if q.op == "Enqueue":
                    arg = self._checked_rhs(cx, q.arg, vtype.elem, var)
                    update = f"_qenq({local}, {arg}, {vtype.capacity}, {var!r})"
                else:
                    update = f"_qdeq({local}, {var!r})"
                if q.cond is not None:
                    cond, _ = cx.emit(q.cond)
                    gen.w(f"if {cond}:")
                    gen.w(f"    {local} = {update}")
                else:
                    gen.w(f"{local} = {update}")

    # ── step-level updates shared by the semantics layer ─────────

    def initial_clocks(self) -> tuple:
        out = []
        for ei, fv in self.clock_entries:
            ev = self.events[ei]
            out.append(0 if ev.guard_any(self.s0, self.t0, *fv) else -1)
        return tuple(out)

    def clocks_after_event(self, s1, t1, c, taken_event_idx: int) -> tuple:
        out = []
        for ci, (ei, fv) in enumerate(self.clock_entries):
            ev = self.events[ei]
            if not ev.guard_any(s1, t1, *fv):
                out.append(-1)
            elif c[ci] < 0 or ei == taken_event_idx:
                out.append(0)
            else:
                out.append(c[ci])
        return tuple(out)

    def clocks_after_tick(self, s, t1, c) -> tuple:
        out = []
        for ci, (ei, fv) in enumerate(self.clock_entries):
            ev = self.events[ei]
            if not ev.guard_any(s, t1, *fv):
                out.append(-1)
            elif c[ci] < 0:
                out.append(0)
            else:
                out.append(min(c[ci] + 1, ev.clock_cap))
        return tuple(out)

    def timers_after_tick(self, t, m) -> tuple:
        return tuple(
            tv if not mv else min(tv + 1, self.timer_bounds[k] + 1)
            for k, (tv, mv) in enumerate(zip(t, m))
        )

    def entry_enabled(self, c, ci: int) -> bool:
        ev = self.events[self.clock_entries[ci][0]]
        v = c[ci]
        return v >= ev.lower and (ev.upper is None or v <= ev.upper)

    def tick_allowed(self, c) -> bool:
        for ci, (ei, _) in enumerate(self.clock_entries):
            u = self.events[ei].upper
            if u is not None and c[ci] == u:
                return False
        return True


def _tuple_code(parts) -> str:
    parts = list(parts)
    if not parts:
        return "()"
    if len(parts) == 1:
        return f"({parts[0]},)"
    return f"({', '.join(parts)})"


_ENGINES: dict[int, Engine] = {}


def engine_for(model: fm.FlatModel) -> Engine:
    key = id(model)
    eng = _ENGINES.get(key)
    if eng is None or eng.model is not model:
        eng = Engine(model)
        _ENGINES[key] = eng
    return eng


# ── raw-tuple fast path used by exploration and checking ─────────
#
# A configuration key is the plain 6-tuple (s, t, m, c, x, p); the
# dataclass wrapper is only materialized at API boundaries.  succ_all
# enumerates every enabled transition of a key in one call, with constant
# guards short-circuited out of the clock-update loops.


def _guard_const_of(model, ev) -> bool | None:
    from ttmc.syntax import ast as _ast

    g = ev.guard
    if isinstance(g, _ast.BoolLit):
        return g.value
    return None


class _FastPaths:
    """Precomputed per-engine tables for succ_all."""

    def __init__(self, eng: "Engine"):
        model = eng.model
        self.entry_event = [eng.events[ei] for ei, _ in eng.clock_entries]
        self.entry_fv = [fv for _, fv in eng.clock_entries]
        self.guard_const = [
            _guard_const_of(model, model.events[ei]) for ei, _ in eng.clock_entries
        ]
        self.all_guards_const = all(g is not None for g in self.guard_const)
        self.event_guard_const = [
            _guard_const_of(model, ev) for ev in model.events
        ]
        # Per event: m-mask updates for the hash step and the event step.
        self.hash_m: list[tuple[int, ...]] = []
        self.event_m: list[tuple[int, ...]] = []
        for ev in eng.events:
            self.hash_m.append(tuple(sorted(set(ev.start_pos) | set(ev.stop_pos))))
            self.event_m.append(tuple(ev.start_pos))
        self.n_timers = len(model.timers)


def _engine_fast(eng: "Engine") -> _FastPaths:
    fp = getattr(eng, "_fast", None)
    if fp is None:
        fp = _FastPaths(eng)
        eng._fast = fp
    return fp


def succ_all(eng: "Engine", key):
    """All (raw transition, successor key) pairs of a configuration key."""
    s, t, m, c, x, p = key
    fp = _engine_fast(eng)
    events = eng.events
    entries = eng.clock_entries
    out = []
    if x is None:
        tick_ok = True
        for ci, (ei, fv) in enumerate(entries):
            ev = events[ei]
            cv = c[ci]
            u = ev.upper
            if u is not None and cv == u:
                tick_ok = False
            if cv < ev.lower or (u is not None and cv > u) or cv < 0:
                continue
            mask = fp.hash_m[ei]
            if mask:
                m1 = list(m)
                for j in mask:
                    m1[j] = False
                m1 = tuple(m1)
            else:
                m1 = m
            raw = ("h", ci)
            out.append((raw, (s, t, m1, c, ci, raw)))
        if tick_ok:
            bounds = eng.timer_bounds
            t1 = tuple(
                tv if not mv else (tv + 1 if tv <= bounds[k] else tv)
                for k, (tv, mv) in enumerate(zip(t, m))
            )
            c1 = _tick_clocks_fast(eng, fp, s, t1, c)
            out.append(("tick", (s, t1, m, c1, None, "tick")))
        return out

    ci = x
    ei, fv = entries[ci]
    ev = events[ei]
    if ev.start_pos:
        tl = list(t)
        ml = list(m)
        for j in ev.start_pos:
            tl[j] = 0
            ml[j] = True
        t1, m1 = tuple(tl), tuple(ml)
    else:
        t1, m1 = t, m
    branches = ev.successors(s, t, *fv)
    shared_c1 = None
    for dem, draws, s1 in branches:
        if fp.all_guards_const:
            if shared_c1 is None:
                shared_c1 = _event_clocks_fast(eng, fp, s1, t1, c, ei)
            c1 = shared_c1
        else:
            c1 = _event_clocks_fast(eng, fp, s1, t1, c, ei)
        lab = ("e", ci, dem)
        out.append((lab, (s1, t1, m1, c1, None, lab)))
    return out


def _event_clocks_fast(eng, fp, s1, t1, c, taken_ei):
    out = []
    for ci2, (ei2, fv2) in enumerate(eng.clock_entries):
        gc = fp.guard_const[ci2]
        if gc is None:
            gc = eng.events[ei2].guard_any(s1, t1, *fv2)
        if not gc:
            out.append(-1)
        elif c[ci2] < 0 or ei2 == taken_ei:
            out.append(0)
        else:
            out.append(c[ci2])
    return tuple(out)


def _tick_clocks_fast(eng, fp, s, t1, c):
    out = []
    for ci2, (ei2, fv2) in enumerate(eng.clock_entries):
        ev2 = eng.events[ei2]
        gc = fp.guard_const[ci2]
        if gc is None:
            gc = ev2.guard_any(s, t1, *fv2)
        if not gc:
            out.append(-1)
        elif c[ci2] < 0:
            out.append(0)
        else:
            cv = c[ci2] + 1
            cap = ev2.clock_cap
            out.append(cv if cv <= cap else cap)
    return tuple(out)
