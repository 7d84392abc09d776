"""Flattening: SourceModel -> FlatModel.

Pipeline: resolve types and constants, instantiate every module used by the
system composition (interface references substituted by their bound
globals), compose instances (prefix renaming, mode combination), build the
three dependency graphs, merge each synchronous event set into one compound
event, and compile every action to an ordered projection list.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ttmc.diagnostics import Diagnostic, ElaborationError, NO_POS, Pos
from ttmc.elaborate import model as fm
from ttmc.elaborate.sync import MemberAction, compile_action, primed_refs
from ttmc.syntax import ast
from ttmc.syntax.fold import fold_expr
from ttmc.syntax.parser import parse_model

MODE_TABLE = {
    ("in", "in"): "in",
    ("in", "out"): "out",
    ("in", "share"): "share",
    ("out", "share"): "share",
    ("share", "share"): "share",
}


def combine_modes(a: str, b: str) -> str | None:
    """Interface mode combination; two writers (out+out) conflict."""
    if (a, b) in MODE_TABLE:
        return MODE_TABLE[(a, b)]
    if (b, a) in MODE_TABLE:
        return MODE_TABLE[(b, a)]
    return None  # out + out


# ── intermediate event / instance forms ──────────────────────────


@dataclass
class IEvent:
    """Resolved event before action compilation."""

    id: str
    f_ind: tuple[tuple[str, fm.Type], ...]
    d_ind: tuple[tuple[str, fm.Type], ...]
    lower: int
    upper: int | None
    fairness: str
    guard: ast.Expr
    start: tuple[str, ...]
    stop: tuple[str, ...]
    stmts: tuple[ast.Stmt, ...]
    sync_targets: tuple[tuple[str, str], ...] | None  # resolved (instance, event)
    declares_sync: bool
    sync_as: str | None = None
    members: tuple[tuple[str, tuple[ast.Stmt, ...]], ...] | None = None
    pos: Pos = NO_POS


@dataclass
class Instance:
    """A (possibly composite) module instance in the flat namespace."""

    name: str | None
    locals: list[fm.FlatVar] = field(default_factory=list)
    timers: list[fm.FlatTimer] = field(default_factory=list)
    events: list[IEvent] = field(default_factory=list)
    iface_modes: dict[str, str] = field(default_factory=dict)  # global -> mode
    member_modules: dict[str, str] = field(default_factory=dict)  # inst -> module


class Context:
    """Shared elaboration state: types, constants, symbols, diagnostics."""

    def __init__(self, source: ast.SourceModel):
        self.source = source
        self.diagnostics: list[Diagnostic] = []
        self.symbols: list[str] = []
        self.symbol_ids: dict[str, int] = {}
        self.types: dict[str, fm.Type] = {}
        self.constants: dict[str, int] = {}
        self.globals: dict[str, tuple[fm.Type, ast.VarDecl]] = {}
        self.global_defines: dict[str, tuple[tuple[tuple[str, fm.Type], ...], ast.Expr]] = {}

    # ── diagnostics ────────────────────────────────────────────

    def error(self, code: str, message: str, pos: Pos = NO_POS) -> None:
        self.diagnostics.append(Diagnostic(code, message, pos))

    def fail_if_errors(self) -> None:
        if self.diagnostics:
            raise ElaborationError(self.diagnostics)

    # ── symbols, types, constants ──────────────────────────────

    def intern(self, name: str) -> int:
        if name not in self.symbol_ids:
            self.symbol_ids[name] = len(self.symbols)
            self.symbols.append(name)
        return self.symbol_ids[name]

    def resolve_all(self) -> None:
        self._resolve_constants()
        for t in self.source.types:
            resolved = self.resolve_type(t.type, allow_enum_decl=True)
            if isinstance(resolved, fm.TEnum) and resolved.name is None:
                resolved = fm.TEnum(t.name, resolved.members)
            self.types[t.name] = resolved
        for g in self.source.globals:
            gtype = self.resolve_type(g.type)
            self.globals[g.name] = (gtype, g)
            if g.name in self.constants or g.name in self.symbol_ids:
                self.error(
                    "DuplicateName",
                    f"global {g.name!r} collides with a constant or symbol",
                    g.pos,
                )

    def _resolve_constants(self) -> None:
        pending = list(self.source.constants)
        progress = True
        while pending and progress:
            progress = False
            remaining = []
            for c in pending:
                try:
                    self.constants[c.name] = self.const_int(c.value)
                    progress = True
                except _Unresolved:
                    remaining.append(c)
            pending = remaining
        for c in pending:
            self.error(
                "UnknownReference",
                f"constant {c.name!r} does not resolve to an integer",
                c.pos,
            )

    def resolve_type(self, t: ast.TypeExpr, allow_enum_decl: bool = False) -> fm.Type:
        if isinstance(t, ast.BoolType):
            return fm.TBool()
        if isinstance(t, ast.TypeName):
            if t.name not in self.types:
                self.error("UnknownReference", f"unknown type {t.name!r}", t.pos)
                return fm.TInt(0, 0)
            return self.types[t.name]
        if isinstance(t, ast.RangeType):
            lo = self.const_int_or(t.lo, 0)
            hi = self.const_int_or(t.hi, 0)
            if hi < lo:
                self.error("BoundError", f"empty range {lo}..{hi}", t.pos)
                hi = lo
            return fm.TInt(lo, hi)
        if isinstance(t, ast.EnumType):
            if not allow_enum_decl:
                self.error(
                    "SyntaxError",
                    "enumerations must be declared as named types",
                    t.pos,
                )
                return fm.TInt(0, 0)
            members = []
            for m in t.members:
                if isinstance(m, ast.Name) and m.name not in self.constants:
                    members.append(self.intern(m.name))
                else:
                    self.error(
                        "SyntaxError",
                        "enumeration members must be fresh symbols",
                        t.pos,
                    )
            name = None
            return fm.TEnum(name, tuple(members))
        if isinstance(t, ast.ArrayType):
            index = self.resolve_type(t.index)
            elem = self.resolve_type(t.elem)
            if not isinstance(index, (fm.TInt, fm.TEnum)):
                self.error("SyntaxError", "array index type must be finite scalar", t.pos)
                index = fm.TInt(0, 0)
            if isinstance(elem, (fm.TArray, fm.TQueue)):
                self.error("SyntaxError", "array elements must be scalar", t.pos)
                elem = fm.TInt(0, 0)
            return fm.TArray(index, elem)
        if isinstance(t, ast.QueueType):
            elem = self.resolve_type(t.elem)
            cap = self.const_int_or(t.capacity, 1)
            if cap < 1:
                self.error("BoundError", "queue capacity must be positive", t.pos)
                cap = 1
            if isinstance(elem, (fm.TArray, fm.TQueue)):
                self.error("SyntaxError", "queue elements must be scalar", t.pos)
                elem = fm.TInt(0, 0)
            return fm.TQueue(elem, cap)
        raise TypeError(f"unknown type expression {t!r}")

    def const_int(self, e: ast.Expr) -> int:
        v = self.const_value(e)
        if not isinstance(v, int) or isinstance(v, bool):
            raise _Unresolved(e)
        return v

    def const_int_or(self, e: ast.Expr, default: int) -> int:
        try:
            return self.const_int(e)
        except _Unresolved:
            self.error(
                "UnknownReference",
                "expected a constant integer expression",
                getattr(e, "pos", NO_POS),
            )
            return default

    def const_value(self, e: ast.Expr):
        """Evaluate a compile-time constant: int, bool, or symbol id."""
        if isinstance(e, ast.IntLit):
            return e.value
        if isinstance(e, ast.BoolLit):
            return e.value
        if isinstance(e, ast.Name):
            if e.name in self.constants:
                return self.constants[e.name]
            if e.name in self.symbol_ids:
                return _SymVal(self.symbol_ids[e.name])
            raise _Unresolved(e)
        if isinstance(e, ast.Unary) and e.op == "-":
            return -self.const_int(e.operand)
        if isinstance(e, ast.Binary):
            a, b = self.const_int(e.lhs), self.const_int(e.rhs)
            ops = {
                "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
                "/": lambda: a // b, "mod": lambda: a % b,
            }
            if e.op in ops:
                return ops[e.op]()
        raise _Unresolved(e)

    def resolve_domain(self, choice: ast.DemonicRange, pos: Pos) -> tuple:
        """Static value tuple for a demonic draw domain."""
        elem = choice.elem
        if isinstance(elem, ast.EnumType):
            values = []
            for m in elem.members:
                try:
                    v = self.const_value(m)
                except _Unresolved:
                    self.error(
                        "UnknownReference",
                        "demonic set members must be constants or symbols",
                        pos,
                    )
                    return (0,)
                values.append(v.sid if isinstance(v, _SymVal) else v)
            return tuple(values)
        t = self.resolve_type(elem)
        if isinstance(t, (fm.TBool, fm.TInt, fm.TEnum)):
            return tuple(t.values())
        self.error("SyntaxError", "demonic domain must be a finite scalar set", pos)
        return (0,)


class _SymVal:
    """Wrapper marking a constant-evaluated symbol id."""

    def __init__(self, sid: int):
        self.sid = sid


class _Unresolved(Exception):
    pass


# ── name resolution inside one module instance ───────────────────


class _Scope:
    """Substitution environment for one module instance."""

    def __init__(self, ctx: Context, inst: str | None):
        self.ctx = ctx
        self.prefix = f"{inst}." if inst else ""
        self.vars: dict[str, tuple[str, fm.Type, str]] = {}  # local name -> (flat, type, mode)
        self.bindings: dict[str, tuple] = {}  # param -> ("var"|"elem"|"value", ...)
        self.timers: dict[str, str] = {}
        self.defines: dict[str, tuple] = dict(ctx.global_defines)
        self.indices: dict[str, fm.Type] = {}

    def resolve(self, e: ast.Expr, writing: bool = False) -> ast.Expr:
        ctx = self.ctx
        if isinstance(e, (ast.IntLit, ast.BoolLit)):
            return e
        if isinstance(e, ast.Name):
            return self._name(e.name, e.pos, primed=False, writing=writing)
        if isinstance(e, ast.PrimedName):
            return self._name(e.name, e.pos, primed=True, writing=writing)
        if isinstance(e, ast.IndexExpr):
            base = self.resolve(e.base, writing=writing)
            index = self.resolve(e.index)
            return ast.IndexExpr(base, index, pos=e.pos)
        if isinstance(e, ast.Unary):
            return ast.Unary(e.op, self.resolve(e.operand), pos=e.pos)
        if isinstance(e, ast.Binary):
            return ast.Binary(e.op, self.resolve(e.lhs), self.resolve(e.rhs), pos=e.pos)
        if isinstance(e, ast.Fold):
            ty = ctx.resolve_type(e.set_type)
            if not isinstance(ty, (fm.TBool, fm.TInt, fm.TEnum)):
                ctx.error("SyntaxError", "fold ranges over a finite scalar type", e.pos)
            outer = self.indices.get(e.var)
            self.indices[e.var] = ty
            body = self.resolve(e.body)
            if outer is None:
                del self.indices[e.var]
            else:
                self.indices[e.var] = outer
            return ast.Fold(e.op, e.var, e.set_type, body, pos=e.pos)
        if isinstance(e, ast.Call):
            if e.name not in self.defines:
                ctx.error("UnknownReference", f"unknown predicate {e.name!r}", e.pos)
                return ast.BoolLit(True, pos=e.pos)
            params, body = self.defines[e.name]
            if len(params) != len(e.args):
                ctx.error(
                    "ArityError",
                    f"predicate {e.name!r} takes {len(params)} arguments",
                    e.pos,
                )
                return ast.BoolLit(True, pos=e.pos)
            args = [self.resolve(a) for a in e.args]
            from ttmc.syntax.ltl import _substitute

            return _substitute(body, {p: a for (p, _), a in zip(params, args)})
        if isinstance(e, ast.QueueOp):
            target = self._name(e.target, e.pos, primed=False)
            if isinstance(target, ast.Name):
                return ast.QueueOp(target.name, e.op, pos=e.pos)
            self.ctx.error("SyntaxError", "queue operations need a queue variable", e.pos)
            return ast.BoolLit(True, pos=e.pos)
        raise TypeError(f"unknown expression {e!r}")

    def _name(self, name: str, pos: Pos, primed: bool, writing: bool = False) -> ast.Expr:
        ctx = self.ctx
        if name in self.indices:
            if primed:
                ctx.error("SyntaxError", f"event index {name!r} cannot be primed", pos)
            return ast.Name(name, pos=pos)
        if name in self.bindings:
            kind, *rest = self.bindings[name]
            mode = rest[-1]
            if writing and mode == "in":
                ctx.error(
                    "ModeMismatch",
                    f"event writes to in-mode interface variable {name!r}",
                    pos,
                )
            if kind == "value":
                if primed or writing:
                    ctx.error(
                        "ModeMismatch",
                        f"{name!r} is bound to a value and cannot be "
                        + ("primed" if primed else "assigned"),
                        pos,
                    )
                return _value_literal(rest[0], pos)
            if kind == "var":
                base = ast.PrimedName(rest[0], pos=pos) if primed else ast.Name(rest[0], pos=pos)
                return base
            # element binding
            gname, idx = rest[0], rest[1]
            base = ast.PrimedName(gname, pos=pos) if primed else ast.Name(gname, pos=pos)
            return ast.IndexExpr(base, _value_literal(idx, pos), pos=pos)
        if name in self.vars:
            flat, _, _ = self.vars[name]
            return ast.PrimedName(flat, pos=pos) if primed else ast.Name(flat, pos=pos)
        if name in self.timers:
            if primed:
                ctx.error("SyntaxError", f"timer {name!r} cannot be primed", pos)
            if writing:
                ctx.error("SyntaxError", f"timer {name!r} cannot be assigned", pos)
            return ast.Name(self.timers[name], pos=pos)
        if name in ctx.constants:
            if primed or writing:
                ctx.error("SyntaxError", f"constant {name!r} is read-only", pos)
            return ast.IntLit(ctx.constants[name], pos=pos)
        if name in ctx.symbol_ids:
            if primed or writing:
                ctx.error("SyntaxError", f"symbol {name!r} is read-only", pos)
            return ast.Name(name, pos=pos)
        ctx.error("UnknownReference", f"unknown name {name!r}", pos)
        return ast.IntLit(0, pos=pos)


def _value_literal(v, pos: Pos) -> ast.Expr:
    if isinstance(v, _SymVal):
        raise TypeError("symbol values must be rendered by caller")
    if isinstance(v, bool):
        return ast.BoolLit(v, pos=pos)
    if isinstance(v, int):
        return ast.IntLit(v, pos=pos)
    if isinstance(v, str):  # symbol name
        return ast.Name(v, pos=pos)
    raise TypeError(f"unexpected value {v!r}")


# ── instantiation ────────────────────────────────────────────────


def instantiate(
    ctx: Context,
    module: ast.ModuleDecl,
    inst_name: str | None,
    args: list,
    dep_bindings: dict[str, str],
    decl_pos: Pos = NO_POS,
) -> Instance:
    """Create one instance: substitute interface references by their bound
    globals (or values), prefix locals/timers/events with the instance name.

    ``args`` entries are ("var", global, mode) / ("elem", global, index, mode)
    / ("value", value, mode) tuples, positionally matching module parameters.
    """
    scope = _Scope(ctx, inst_name)
    inst = Instance(name=inst_name)
    if inst_name is not None:
        inst.member_modules[inst_name] = module.name

    if len(args) < len(module.params):
        missing = module.params[len(args)].name
        ctx.error(
            "MissingBinding",
            f"instance of {module.name!r} leaves interface variable "
            f"{missing!r} unbound",
            decl_pos,
        )
    elif len(args) > len(module.params):
        ctx.error(
            "ModeMismatch",
            f"instance of {module.name!r} has {len(args)} arguments for "
            f"{len(module.params)} interface variables",
            decl_pos,
        )
    for param, arg in zip(module.params, args):
        kind, *payload = arg
        mode = payload[-1]
        if mode != param.mode:
            ctx.error(
                "ModeMismatch",
                f"argument mode {mode!r} does not match declared mode "
                f"{param.mode!r} of {module.name}.{param.name}",
                decl_pos,
            )
        if kind == "value" and param.mode != "in":
            ctx.error(
                "ModeMismatch",
                f"a plain value cannot be bound to {param.mode!r} slot "
                f"{module.name}.{param.name}",
                decl_pos,
            )
        ptype = ctx.resolve_type(param.type)
        if kind in ("var", "elem"):
            gname = payload[0]
            if gname not in ctx.globals:
                ctx.error(
                    "UnknownReference",
                    f"unknown global {gname!r} in instance argument",
                    decl_pos,
                )
                continue
            gtype = ctx.globals[gname][0]
            bound_type = gtype
            if kind == "elem":
                if not isinstance(gtype, fm.TArray):
                    ctx.error(
                        "TypeError",
                        f"global {gname!r} is not an array",
                        decl_pos,
                    )
                    continue
                bound_type = gtype.elem
            if bound_type != ptype:
                ctx.error(
                    "TypeError",
                    f"type of binding for {module.name}.{param.name} "
                    f"({bound_type}) does not match declared {ptype}",
                    decl_pos,
                )
            prev = inst.iface_modes.get(gname)
            if prev is not None:
                combined = combine_modes(prev, param.mode)
                inst.iface_modes[gname] = combined or "share"
            else:
                inst.iface_modes[gname] = param.mode
        scope.bindings[param.name] = tuple(arg)

    # Dependency slots.
    declared_slots = {d.slot: d for d in module.depends}
    for slot, bound in dep_bindings.items():
        if slot not in declared_slots:
            ctx.error(
                "UnknownDependency",
                f"module {module.name!r} declares no dependency slot {slot!r}",
                decl_pos,
            )
    resolved_deps: dict[str, str] = {}
    for d in module.depends:
        if d.slot not in dep_bindings:
            ctx.error(
                "MissingBinding",
                f"dependency slot {d.slot!r} of module {module.name!r} is "
                "not bound (use a `with ... end` clause)",
                decl_pos,
            )
        else:
            resolved_deps[d.slot] = dep_bindings[d.slot]

    # Locals and timers, prefixed into the flat namespace.
    for v in module.locals:
        vtype = ctx.resolve_type(v.type)
        flat = scope.prefix + v.name
        init = _init_value(ctx, vtype, v.init, v.pos)
        inst.locals.append(fm.FlatVar(flat, vtype, "local", init, pos=v.pos))
        scope.vars[v.name] = (flat, vtype, "local")
    for t in module.timers:
        bound = ctx.const_int_or(t.bound, 0)
        if bound < 0:
            ctx.error("BoundError", "timer bound must be >= 0", t.pos)
            bound = 0
        init = ctx.const_int_or(t.init, 0) if t.init is not None else 0
        if not 0 <= init <= bound + 1:
            ctx.error("BoundError", "timer initial value outside 0..bound+1", t.pos)
            init = 0
        flat = scope.prefix + t.name
        inst.timers.append(fm.FlatTimer(flat, bound, init, pos=t.pos))
        scope.timers[t.name] = flat

    # Module-level defines shadow global ones inside this module.
    for d in module.defines:
        params = tuple((p, ctx.resolve_type(ty)) for p, ty in d.params)
        dscope = _Scope(ctx, inst_name)
        dscope.vars = scope.vars
        dscope.bindings = scope.bindings
        dscope.timers = scope.timers
        dscope.indices = {p: ty for p, ty in params}
        body = dscope.resolve(d.body)
        scope.defines[d.name] = (params, body)

    # Events.
    timer_names = set(scope.timers)
    for e in module.events:
        inst.events.append(_resolve_event(ctx, scope, module, e, timer_names, resolved_deps))
    return inst


def _init_value(ctx: Context, vtype: fm.Type, init: ast.Expr | None, pos: Pos):
    if init is None:
        return fm.default_value(vtype)
    try:
        v = ctx.const_value(init)
    except _Unresolved:
        ctx.error("UnknownReference", "initial values must be constant", pos)
        return fm.default_value(vtype)
    if isinstance(v, _SymVal):
        v = v.sid
    base = vtype.elem if isinstance(vtype, fm.TArray) else vtype
    if isinstance(vtype, fm.TQueue):
        ctx.error("SyntaxError", "queues start empty and take no initializer", pos)
        return ()
    ok = (
        (isinstance(base, fm.TBool) and isinstance(v, bool))
        or (isinstance(base, fm.TInt) and isinstance(v, int) and not isinstance(v, bool)
            and base.lo <= v <= base.hi)
        or (isinstance(base, fm.TEnum) and isinstance(v, int) and not isinstance(v, bool)
            and v in base.members)
    )
    if not ok:
        ctx.error("TypeError", f"initial value is not in the declared type", pos)
        return fm.default_value(vtype)
    if isinstance(vtype, fm.TArray):
        return tuple(v for _ in range(fm.array_positions(vtype)))
    return v


def _resolve_event(
    ctx: Context,
    scope: _Scope,
    module: ast.ModuleDecl,
    e: ast.EventDecl,
    timer_names: set[str],
    resolved_deps: dict[str, str],
) -> IEvent:
    f_ind: list[tuple[str, fm.Type]] = []
    d_ind: list[tuple[str, fm.Type]] = []
    saved_indices = dict(scope.indices)
    for ix in e.indices:
        ty = ctx.resolve_type(ix.type)
        if not isinstance(ty, (fm.TBool, fm.TInt, fm.TEnum)):
            ctx.error("SyntaxError", "event indices range over finite scalars", ix.pos)
            ty = fm.TInt(0, 0)
        scope.indices[ix.name] = ty
        (f_ind if ix.fair else d_ind).append((ix.name, ty))

    lower, upper = 0, None
    if e.bounds is not None:
        lower = ctx.const_int_or(e.bounds[0], 0)
        upper = None if e.bounds[1] is None else ctx.const_int_or(e.bounds[1], lower)
        if upper is not None and lower > upper:
            ctx.error(
                "BoundError",
                f"lower time bound {lower} exceeds upper bound {upper}",
                e.pos,
            )
            upper = lower
        if lower < 0:
            ctx.error("BoundError", "time bounds must be natural numbers", e.pos)
            lower = 0

    guard = scope.resolve(e.guard) if e.guard is not None else ast.BoolLit(True, pos=e.pos)

    def timer_list(names):
        out = []
        for n in names:
            if n not in timer_names:
                ctx.error(
                    "UnknownReference",
                    f"event {e.name!r} starts/stops unknown timer {n!r}",
                    e.pos,
                )
            else:
                out.append(scope.timers[n])
        return tuple(sorted(out))

    start = timer_list(e.start)
    stop = timer_list(e.stop)
    stmts = tuple(_resolve_stmt(ctx, scope, s) for s in e.action)

    sync_targets = None
    sync_as = None
    if e.sync is not None:
        sync_as = e.sync.as_name
        targets = []
        for slot, ev in e.sync.targets:
            if slot not in resolved_deps:
                ctx.error(
                    "UnknownDependency",
                    f"sync clause of {e.name!r} references unknown or unbound "
                    f"dependency slot {slot!r}",
                    e.sync.pos,
                )
                continue
            targets.append((resolved_deps[slot], ev, e.sync.pos))
        sync_targets = tuple(targets)

    scope.indices = saved_indices
    eid = scope.prefix + e.name
    return IEvent(
        id=eid,
        f_ind=tuple((ix, ty) for ix, ty in f_ind),
        d_ind=tuple((ix, ty) for ix, ty in d_ind),
        lower=lower,
        upper=upper,
        fairness=e.fairness,
        guard=guard,
        start=start,
        stop=stop,
        stmts=stmts,
        sync_targets=sync_targets,
        declares_sync=e.sync is not None,
        sync_as=sync_as,
        pos=e.pos,
    )


def _resolve_stmt(ctx: Context, scope: _Scope, s: ast.Stmt) -> ast.Stmt:
    if isinstance(s, ast.SkipStmt):
        return s
    if isinstance(s, ast.Assign):
        return ast.Assign(
            scope.resolve(s.target, writing=True), scope.resolve(s.value), pos=s.pos
        )
    if isinstance(s, ast.DemonicAssign):
        for p in primed_refs(s.choice.elem if isinstance(s.choice.elem, ast.Expr) else None):
            ctx.error("SyntaxError", "demonic domains cannot be primed", s.pos)
        return ast.DemonicAssign(
            scope.resolve(s.target, writing=True), s.choice, pos=s.pos
        )
    if isinstance(s, ast.IfStmt):
        return ast.IfStmt(
            tuple(
                (scope.resolve(c), tuple(_resolve_stmt(ctx, scope, b) for b in body))
                for c, body in s.branches
            ),
            tuple(_resolve_stmt(ctx, scope, b) for b in s.orelse),
            pos=s.pos,
        )
    if isinstance(s, ast.QueueStmt):
        target = scope.resolve(ast.Name(s.target, pos=s.pos), writing=True)
        if not isinstance(target, ast.Name):
            ctx.error("SyntaxError", "queue operations need a queue variable", s.pos)
            return ast.SkipStmt(pos=s.pos)
        arg = scope.resolve(s.arg) if s.arg is not None else None
        return ast.QueueStmt(target.name, s.op, arg, pos=s.pos)
    raise TypeError(f"unknown statement {s!r}")


# ── composition ──────────────────────────────────────────────────


def compose(ctx: Context, a: Instance, b: Instance) -> Instance:
    """Parallel composition: disjoint union of locals/timers/events, mode
    combination on shared globals (two `out` writers conflict)."""
    out = Instance(name=None)
    out.locals = a.locals + b.locals
    out.timers = a.timers + b.timers
    out.events = a.events + b.events
    out.member_modules = dict(a.member_modules)
    for inst, mod in b.member_modules.items():
        if inst in out.member_modules:
            ctx.error(
                "NameCollision",
                f"instance {inst!r} appears twice in the composition",
            )
        out.member_modules[inst] = mod
    seen_events: set[str] = set()
    for e in out.events:
        if e.id in seen_events:
            ctx.error("NameCollision", f"duplicate event id {e.id!r} after renaming", e.pos)
        seen_events.add(e.id)
    seen_vars: set[str] = set()
    for v in out.locals:
        if v.name in seen_vars:
            ctx.error("NameCollision", f"duplicate variable {v.name!r} after renaming", v.pos)
        seen_vars.add(v.name)
    out.iface_modes = dict(a.iface_modes)
    for g, mode in b.iface_modes.items():
        if g in out.iface_modes:
            combined = combine_modes(out.iface_modes[g], mode)
            if combined is None:
                ctx.error(
                    "ModeConflict",
                    f"two instances both declare global {g!r} as 'out' "
                    "(one writer allowed)",
                )
                combined = "share"
            out.iface_modes[g] = combined
        else:
            out.iface_modes[g] = mode
    return out


def iterated_compose(ctx: Context, values, make_instance) -> Instance:
    """Left fold of compose over ``make_instance(value)`` in value order."""
    values = list(values)
    if not values:
        ctx.error("EmptyIteration", "iterated composition over an empty set")
        ctx.fail_if_errors()
    acc = make_instance(values[0])
    for v in values[1:]:
        acc = compose(ctx, acc, make_instance(v))
    return acc


# ── dependency graphs and synchronization ────────────────────────


def build_dependency_graphs(ctx: Context, system: Instance):
    """Module dependency graph, event dependency graph, and the synchronous
    event sets (connected components of the event graph)."""
    source = ctx.source
    module_nodes = sorted(set(system.member_modules.values()))
    module_edges: list[tuple[str, str]] = []
    for mod_name in module_nodes:
        mod = source.module(mod_name)
        if mod is None:
            continue
        for d in mod.depends:
            module_edges.append((mod_name, d.module))
    module_edges = sorted(set(module_edges))

    cycle = _digraph_cycle(module_nodes, module_edges)
    if cycle:
        chain = " -> ".join(cycle + [cycle[0]])
        pos = NO_POS
        mod = source.module(cycle[0])
        if mod is not None:
            pos = mod.pos
        ctx.error("CyclicModuleDependency", f"module dependency cycle: {chain}", pos)

    event_ids = {e.id: e for e in system.events}
    event_edges: list[tuple[str, str]] = []
    for e in system.events:
        if not e.sync_targets:
            continue
        for inst, ev, pos in e.sync_targets:
            target = f"{inst}.{ev}"
            if target not in event_ids:
                ctx.error(
                    "SyncTargetNotFound",
                    f"sync clause of {e.id!r} references unknown event {target!r}",
                    pos,
                )
                continue
            event_edges.append((e.id, target))
    event_edges = sorted(set(event_edges))

    ecycle = _digraph_cycle(sorted(event_ids), event_edges)
    if ecycle:
        chain = " -> ".join(ecycle + [ecycle[0]])
        ctx.error(
            "CyclicEventDependency",
            f"event synchronization cycle: {chain}",
            event_ids[ecycle[0]].pos,
        )

    # Synchronous event sets: connected components with at least one edge.
    neighbours: dict[str, set[str]] = {}
    for a, b in event_edges:
        neighbours.setdefault(a, set()).add(b)
        neighbours.setdefault(b, set()).add(a)
    seen: set[str] = set()
    sync_sets: list[list[str]] = []
    for eid in sorted(neighbours):
        if eid in seen:
            continue
        comp = []
        stack = [eid]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            comp.append(v)
            stack.extend(neighbours[v])
        sync_sets.append(sorted(comp))

    # Module component for each sync set (undirected closure of module edges).
    mod_adj: dict[str, set[str]] = {m: set() for m in module_nodes}
    for a, b in module_edges:
        mod_adj.setdefault(a, set()).add(b)
        mod_adj.setdefault(b, set()).add(a)
    infos = []
    for members in sync_sets:
        mods = set()
        for eid in members:
            inst = eid.rsplit(".", 1)[0] if "." in eid else None
            if inst is not None and inst in system.member_modules:
                mods.add(system.member_modules[inst])
        comp: set[str] = set()
        stack = sorted(mods)
        while stack:
            m = stack.pop()
            if m in comp:
                continue
            comp.add(m)
            stack.extend(mod_adj.get(m, ()))
        infos.append(
            fm.SyncSetInfo(tuple(members), _compound_id(ctx, members), tuple(sorted(comp)))
        )

    graphs = fm.DependencyGraphs(
        module_nodes=tuple(module_nodes),
        module_edges=tuple(module_edges),
        event_nodes=tuple(sorted(event_ids)),
        event_edges=tuple(event_edges),
        sync_sets=tuple(infos),
    )
    return graphs


def _compound_id(ctx: Context, members: list[str]) -> str:
    instances = sorted({m.rsplit(".", 1)[0] for m in members if "." in m})
    group = None
    for r in ctx.source.renames:
        if sorted(r.instances) == instances:
            group = r.name
            break
    if group is None:
        group = "_".join(instances)
    return group


def _digraph_cycle(nodes, edges) -> list[str] | None:
    adj: dict[str, list[str]] = {n: [] for n in nodes}
    for a, b in edges:
        if a in adj and b in adj:
            adj[a].append(b)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    parent: dict[str, str] = {}

    for root in sorted(nodes):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(sorted(adj[root])))]
        color[root] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    parent[nxt] = node
                    stack.append((nxt, iter(sorted(adj[nxt]))))
                    advanced = True
                    break
                if color[nxt] == GRAY:
                    # Reconstruct the cycle nxt -> ... -> node -> nxt.
                    cycle = [node]
                    v = node
                    while v != nxt:
                        v = parent[v]
                        cycle.append(v)
                    cycle.reverse()
                    return cycle
            if not advanced:
                color[node] = BLACK
                stack.pop()
        continue
    return None


_FAIR_RANK = {"spontaneous": 0, "just": 1, "compassionate": 2}


def merge_sync_set(ctx: Context, info: fm.SyncSetInfo, events: dict[str, IEvent]) -> IEvent:
    """One compound event from the members of a synchronous event set."""
    members = [events[eid] for eid in info.members]
    as_names = sorted({e.sync_as for e in members if e.sync_as is not None})
    as_name = as_names[0] if as_names else "sync"
    if len(as_names) > 1:
        ctx.error(
            "SyntaxError",
            f"conflicting `as` names for one synchronous set: {as_names}",
            members[0].pos,
        )
    compound_qualifier = info.compound_name
    cid = f"{compound_qualifier}.{as_name}"

    lower = max(e.lower for e in members)
    uppers = [e.upper for e in members if e.upper is not None]
    upper = min(uppers) if uppers else None
    if upper is not None and lower > upper:
        ctx.error(
            "MergedBoundEmpty",
            f"merged time bounds of {cid!r} are empty: "
            f"[max l = {lower}, min u = {upper}]",
            members[0].pos,
        )
        upper = lower
    fairness = max((e.fairness for e in members), key=lambda f: _FAIR_RANK[f])

    guard: ast.Expr | None = None
    f_ind: list[tuple[str, fm.Type]] = []
    d_ind: list[tuple[str, fm.Type]] = []
    start: set[str] = set()
    stop: set[str] = set()
    member_stmts: list[tuple[str, tuple[ast.Stmt, ...]]] = []
    for e in members:
        ren = _index_renaming(e)
        g = _rename_indices_expr(e.guard, ren)
        guard = g if guard is None else ast.Binary("&&", guard, g)
        f_ind.extend((ren.get(n, n), t) for n, t in e.f_ind)
        d_ind.extend((ren.get(n, n), t) for n, t in e.d_ind)
        start.update(e.start)
        stop.update(e.stop)
        member_stmts.append((e.id, tuple(_rename_indices_stmt(s, ren) for s in e.stmts)))

    seen_idx: set[str] = set()
    for n, _ in f_ind + d_ind:
        if n in seen_idx:
            ctx.error("DuplicateName", f"compound event {cid!r} has colliding index {n!r}")
        seen_idx.add(n)

    return IEvent(
        id=cid,
        f_ind=tuple(f_ind),
        d_ind=tuple(d_ind),
        lower=lower,
        upper=upper,
        fairness=fairness,
        guard=guard if guard is not None else ast.BoolLit(True),
        start=tuple(sorted(start)),
        stop=tuple(sorted(stop)),
        stmts=(),
        sync_targets=None,
        declares_sync=False,
        members=tuple(member_stmts),
        pos=members[0].pos,
    )


def _index_renaming(e: IEvent) -> dict[str, str]:
    inst = e.id.rsplit(".", 1)[0] if "." in e.id else ""
    ren = {}
    for n, _ in list(e.f_ind) + list(e.d_ind):
        ren[n] = f"{inst}.{n}" if inst else n
    return ren


def _rename_indices_expr(e: ast.Expr, ren: dict[str, str]) -> ast.Expr:
    if not ren:
        return e
    from ttmc.syntax.ltl import _substitute

    return _substitute(e, {old: ast.Name(new) for old, new in ren.items()})


def _rename_indices_stmt(s: ast.Stmt, ren: dict[str, str]) -> ast.Stmt:
    if not ren:
        return s
    if isinstance(s, ast.SkipStmt):
        return s
    if isinstance(s, ast.Assign):
        return ast.Assign(
            _rename_indices_expr(s.target, ren), _rename_indices_expr(s.value, ren), pos=s.pos
        )
    if isinstance(s, ast.DemonicAssign):
        return ast.DemonicAssign(_rename_indices_expr(s.target, ren), s.choice, pos=s.pos)
    if isinstance(s, ast.IfStmt):
        return ast.IfStmt(
            tuple(
                (_rename_indices_expr(c, ren), tuple(_rename_indices_stmt(b, ren) for b in body))
                for c, body in s.branches
            ),
            tuple(_rename_indices_stmt(b, ren) for b in s.orelse),
            pos=s.pos,
        )
    if isinstance(s, ast.QueueStmt):
        arg = _rename_indices_expr(s.arg, ren) if s.arg is not None else None
        return ast.QueueStmt(s.target, s.op, arg, pos=s.pos)
    raise TypeError(f"unknown statement {s!r}")


# ── static expression typing ─────────────────────────────────────


class _TypeCheck:
    """Light static typing over resolved expressions.

    Tags: 'int', 'bool', ('enum', frozenset of symbol ids),
    ('array', index_type, elem_tag), ('queue', elem_tag).
    Range membership of int assignments is enforced at execution time.
    """

    def __init__(self, ctx: Context, vars: dict[str, fm.FlatVar], timers: set[str]):
        self.ctx = ctx
        self.vars = vars
        self.timers = timers
        self.indices: dict[str, fm.Type] = {}

    def tag_of_type(self, t: fm.Type):
        if isinstance(t, fm.TBool):
            return "bool"
        if isinstance(t, fm.TInt):
            return "int"
        if isinstance(t, fm.TEnum):
            return ("enum", frozenset(t.members))
        if isinstance(t, fm.TArray):
            return ("array", t.index, self.tag_of_type(t.elem))
        if isinstance(t, fm.TQueue):
            return ("queue", self.tag_of_type(t.elem))
        raise TypeError(t)

    def err(self, msg: str, pos: Pos):
        self.ctx.error("TypeError", msg, pos)

    def expr(self, e: ast.Expr):
        ctx = self.ctx
        if isinstance(e, ast.IntLit):
            return "int"
        if isinstance(e, ast.BoolLit):
            return "bool"
        if isinstance(e, (ast.Name, ast.PrimedName)):
            name = e.name
            if name in self.indices:
                return self.tag_of_type(self.indices[name])
            if name in self.vars:
                return self.tag_of_type(self.vars[name].type)
            if name in self.timers:
                return "int"
            if name in ctx.symbol_ids:
                return ("enum", frozenset({ctx.symbol_ids[name]}))
            self.err(f"unresolved name {name!r}", getattr(e, "pos", NO_POS))
            return "int"
        if isinstance(e, ast.IndexExpr):
            base = self.expr(e.base)
            idx = self.expr(e.index)
            if not isinstance(base, tuple) or base[0] != "array":
                self.err("indexing a non-array value", e.pos)
                return "int"
            _, index_type, elem = base
            want = self.tag_of_type(index_type)
            if not self._compat(want, idx):
                self.err("array index has the wrong type", e.pos)
            return elem
        if isinstance(e, ast.Unary):
            t = self.expr(e.operand)
            want = "bool" if e.op == "!" else "int"
            if t != want:
                self.err(f"operator {e.op!r} needs a {want} operand", e.pos)
            return want
        if isinstance(e, ast.Binary):
            lt, rt = self.expr(e.lhs), self.expr(e.rhs)
            if e.op in ("&&", "||", "=>"):
                if lt != "bool" or rt != "bool":
                    self.err(f"operator {e.op!r} needs boolean operands", e.pos)
                return "bool"
            if e.op in ("==", "!="):
                if not self._compat(lt, rt):
                    self.err("comparison between incompatible types", e.pos)
                return "bool"
            if e.op in ("<", "<=", ">", ">="):
                if lt != "int" or rt != "int":
                    self.err(f"ordering {e.op!r} needs integer operands", e.pos)
                return "bool"
            if lt != "int" or rt != "int":
                self.err(f"arithmetic {e.op!r} needs integer operands", e.pos)
            return "int"
        if isinstance(e, ast.Fold):
            ty = self.ctx.resolve_type(e.set_type)
            outer = self.indices.get(e.var)
            self.indices[e.var] = ty
            body = self.expr(e.body)
            if outer is None:
                self.indices.pop(e.var, None)
            else:
                self.indices[e.var] = outer
            if body != "bool":
                self.err("fold body must be boolean", e.pos)
            return "bool"
        if isinstance(e, ast.QueueOp):
            t = self.expr(ast.Name(e.target, pos=e.pos))
            if not isinstance(t, tuple) or t[0] != "queue":
                self.err(f"{e.target!r} is not a queue", e.pos)
                return "int"
            return "int" if e.op == "Count" else t[1]
        raise TypeError(f"unexpected expression {e!r}")

    def _compat(self, a, b) -> bool:
        if a == b:
            return True
        if isinstance(a, tuple) and isinstance(b, tuple) and a[0] == b[0] == "enum":
            return bool(a[1] & b[1])
        return False

    def _assignable(self, target, value) -> bool:
        if target == value:
            return True
        if isinstance(target, tuple) and isinstance(value, tuple) \
                and target[0] == value[0] == "enum":
            return value[1] <= target[1]
        return False

    def check_event(self, e: fm.FlatEvent):
        self.indices = {n: t for n, t in list(e.f_ind) + list(e.d_ind)}
        if self.expr(e.guard) != "bool":
            self.err(f"guard of event {e.id!r} must be boolean", e.pos)
        if len(e.members) <= 1 and e.guard_has_primes:
            self.ctx.error(
                "SyntaxError",
                f"primed references in the guard of {e.id!r} need a "
                "synchronous event set",
                e.pos,
            )
        for proj in e.action:
            if proj.var not in self.vars:
                self.err(f"assignment to unknown variable {proj.var!r}", e.pos)
                continue
            vtype = self.vars[proj.var].type
            for site in proj.sites:
                if site.cond is not None and self.expr(site.cond) != "bool":
                    self.err("branch condition must be boolean", site.pos)
                if isinstance(vtype, fm.TArray):
                    elem_tag = self.tag_of_type(vtype.elem)
                    if site.demonic_array:
                        self._check_domain(site.demonic, vtype.elem, site.pos)
                        continue
                    if site.index is None:
                        self.err(
                            f"array {proj.var!r} needs an element target",
                            site.pos,
                        )
                        continue
                    want = self.tag_of_type(vtype.index)
                    if not self._compat(want, self.expr(site.index)):
                        self.err("array index has the wrong type", site.pos)
                    self._check_site_value(site, vtype.elem, elem_tag)
                else:
                    if site.index is not None or site.demonic_array:
                        self.err(f"{proj.var!r} is not an array", site.pos)
                        continue
                    self._check_site_value(site, vtype, self.tag_of_type(vtype))
        for q in e.queue_effects:
            if q.var not in self.vars or not isinstance(self.vars[q.var].type, fm.TQueue):
                self.err(f"{q.var!r} is not a queue", q.pos)
                continue
            if q.cond is not None and self.expr(q.cond) != "bool":
                self.err("branch condition must be boolean", q.pos)
            if q.op == "Enqueue":
                elem = self.vars[q.var].type.elem
                if not self._assignable(self.tag_of_type(elem), self.expr(q.arg)):
                    self.err("enqueued value has the wrong type", q.pos)
        self.indices = {}

    def _check_site_value(self, site: fm.WriteSite, target_type: fm.Type, target_tag):
        if site.value is not None:
            if not self._assignable(target_tag, self.expr(site.value)):
                self.err("assigned value has the wrong type", site.pos)
        else:
            self._check_domain(site.demonic, target_type, site.pos)

    def _check_domain(self, domain, target_type: fm.Type, pos: Pos):
        for v in domain or ():
            ok = (
                (isinstance(target_type, fm.TBool) and isinstance(v, bool))
                or (isinstance(target_type, fm.TInt) and isinstance(v, int)
                    and not isinstance(v, bool) and target_type.lo <= v <= target_type.hi)
                or (isinstance(target_type, fm.TEnum) and isinstance(v, int)
                    and not isinstance(v, bool) and v in target_type.members)
            )
            if not ok:
                self.err("demonic domain value outside the target's type", pos)
                return


# ── the flatten driver ───────────────────────────────────────────


def _arg_tuples(ctx: Context, args, iter_env: dict[str, object], pos: Pos):
    """Classify instance arguments into var/elem/value binding tuples."""
    out = []
    for a in args:
        v = a.value
        if isinstance(v, ast.Name) and v.name in ctx.globals:
            out.append(("var", v.name, a.mode))
            continue
        if isinstance(v, ast.IndexExpr) and isinstance(v.base, ast.Name) \
                and v.base.name in ctx.globals:
            try:
                idx = _eval_with_env(ctx, v.index, iter_env)
            except _Unresolved:
                ctx.error(
                    "UnknownReference",
                    "array element bindings need a constant index",
                    a.pos,
                )
                idx = 0
            gtype = ctx.globals[v.base.name][0]
            if isinstance(gtype, fm.TArray):
                dom = fm.finite_values(gtype.index)
                if idx not in dom:
                    ctx.error(
                        "BoundError",
                        f"element index {idx!r} outside the array's index type",
                        a.pos,
                    )
            out.append(("elem", v.base.name, idx, a.mode))
            continue
        try:
            val = _eval_with_env(ctx, v, iter_env)
        except _Unresolved:
            ctx.error(
                "UnknownReference",
                "instance arguments must be globals, global elements, or "
                "constant values",
                a.pos,
            )
            val = 0
        out.append(("value", val, a.mode))
    return out


def _eval_with_env(ctx: Context, e: ast.Expr, env: dict[str, object]):
    if isinstance(e, ast.Name) and e.name in env:
        return env[e.name]
    if isinstance(e, ast.Binary):
        lhs = _eval_with_env(ctx, e.lhs, env)
        rhs = _eval_with_env(ctx, e.rhs, env)
        if isinstance(lhs, int) and isinstance(rhs, int):
            return ctx.const_value(ast.Binary(e.op, ast.IntLit(lhs), ast.IntLit(rhs)))
        raise _Unresolved(e)
    v = ctx.const_value(e)
    if isinstance(v, _SymVal):
        return ctx.symbols[v.sid]  # symbol values rendered as names
    return v


def _value_sort_key(v):
    return (0, v) if isinstance(v, (bool, int)) else (1, str(v))


def _render_value(ctx: Context, v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def flatten(source: ast.SourceModel, strict_action_edges: bool = False) -> fm.FlatModel:
    """Flatten a parsed model into a single instance with compound events
    resolved; raises ElaborationError carrying diagnostics on failure."""
    ctx = Context(source)
    ctx.resolve_all()
    for d in source.defines:
        params = tuple((p, ctx.resolve_type(ty)) for p, ty in d.params)
        dscope = _Scope(ctx, None)
        dscope.indices = {p: ty for p, ty in params}
        ctx.global_defines[d.name] = (params, dscope.resolve(d.body))
    ctx.fail_if_errors()

    instances: dict[str, Instance] = {}

    def get_instance(name: str) -> Instance:
        if name in instances:
            return instances[name]
        decl = source.instance(name)
        if decl is None:
            ctx.error("UnknownReference", f"unknown instance {name!r}")
            ctx.fail_if_errors()
        module = source.module(decl.module)
        if module is None:
            ctx.error(
                "UnknownReference",
                f"instance {name!r} uses unknown module {decl.module!r}",
                decl.pos,
            )
            ctx.fail_if_errors()
        args = _arg_tuples(ctx, decl.args, {}, decl.pos)
        for slot, inst in decl.with_bindings:
            if source.instance(inst) is None:
                ctx.error(
                    "UnknownDependency",
                    f"with-clause binds {slot!r} to unknown instance {inst!r}",
                    decl.pos,
                )
        inst_obj = instantiate(
            ctx, module, name, args, dict(decl.with_bindings), decl.pos
        )
        instances[name] = inst_obj
        return inst_obj

    rename_groups = {r.name: r.instances for r in source.renames}

    def eval_comp(c: ast.CompExpr) -> Instance:
        if isinstance(c, ast.CompName):
            if c.name in rename_groups:
                insts = rename_groups[c.name]
                acc = get_instance(insts[0])
                for n in insts[1:]:
                    acc = compose(ctx, acc, get_instance(n))
                return acc
            return get_instance(c.name)
        if isinstance(c, ast.CompPar):
            return compose(ctx, eval_comp(c.left), eval_comp(c.right))
        if isinstance(c, ast.CompIter):
            ty = ctx.resolve_type(c.set_type)
            if not isinstance(ty, (fm.TBool, fm.TInt, fm.TEnum)):
                ctx.error("SyntaxError", "iteration needs a finite scalar type", c.pos)
                ctx.fail_if_errors()
            module = source.module(c.module)
            if module is None:
                ctx.error(
                    "UnknownReference",
                    f"iterated composition uses unknown module {c.module!r}",
                    c.pos,
                )
                ctx.fail_if_errors()
            values = [
                ctx.symbols[v] if isinstance(ty, fm.TEnum) else v
                for v in fm.finite_values(ty)
            ]

            def make(v):
                args = _arg_tuples(ctx, c.args, {c.var: v}, c.pos)
                return instantiate(
                    ctx, module, f"{c.module}_{_render_value(ctx, v)}", args, {}, c.pos
                )

            return iterated_compose(ctx, values, make)
        raise TypeError(f"unknown composition {c!r}")

    if source.system is not None:
        system = eval_comp(source.system)
    elif len(source.modules) == 1 and not source.instances:
        system = instantiate(ctx, source.modules[0], None, [], {}, source.modules[0].pos)
    elif source.instances:
        ctx.error(
            "UnknownReference",
            "a model with instances needs a `system = ...` composition",
        )
        ctx.fail_if_errors()
        raise AssertionError
    else:
        ctx.error(
            "UnknownReference",
            "a model needs exactly one module or an instances/system section",
        )
        ctx.fail_if_errors()
        raise AssertionError
    ctx.fail_if_errors()

    graphs = build_dependency_graphs(ctx, system)
    ctx.fail_if_errors()

    # Merge synchronous sets into compound events.
    events_by_id = {e.id: e for e in system.events}
    merged: dict[str, IEvent] = {}
    in_sync: set[str] = set()
    for info in graphs.sync_sets:
        compound = merge_sync_set(ctx, info, events_by_id)
        merged[compound.id] = compound
        in_sync.update(info.members)
    remaining = [e for e in system.events if e.id not in in_sync]
    all_ievents = sorted(remaining + list(merged.values()), key=lambda e: e.id)
    ctx.fail_if_errors()

    # Variable table: declared globals first, then instance locals.
    variables: list[fm.FlatVar] = []
    for gname, (gtype, gdecl) in ctx.globals.items():
        mode = system.iface_modes.get(gname, "share")
        init = _init_value(ctx, gtype, gdecl.init, gdecl.pos)
        variables.append(fm.FlatVar(gname, gtype, mode, init, pos=gdecl.pos))
    variables.extend(system.locals)
    var_map = {v.name: v for v in variables}
    timer_names = {t.name for t in system.timers}

    def is_array(name: str) -> bool:
        return name in var_map and isinstance(var_map[name].type, fm.TArray)

    def is_queue(name: str) -> bool:
        return name in var_map and isinstance(var_map[name].type, fm.TQueue)

    flat_events: list[fm.FlatEvent] = []
    for ie in all_ievents:
        if ie.members is not None:
            members = [MemberAction(mid, stmts) for mid, stmts in ie.members]
            member_ids = tuple(mid for mid, _ in ie.members)
        else:
            members = [MemberAction(ie.id, ie.stmts)]
            member_ids = (ie.id,)
        compiled = compile_action(
            members, ctx.resolve_domain, is_array, is_queue,
            compound=ie.members is not None,
            strict_edges=strict_action_edges,
        )
        ctx.diagnostics.extend(compiled.diagnostics)
        flat_events.append(
            fm.FlatEvent(
                id=ie.id,
                f_ind=ie.f_ind,
                d_ind=ie.d_ind,
                lower=ie.lower,
                upper=ie.upper,
                fairness=ie.fairness,
                guard=fold_expr(ie.guard),
                start=ie.start,
                stop=ie.stop,
                action=compiled.projections,
                queue_effects=compiled.queue_effects,
                members=member_ids,
                pos=ie.pos,
            )
        )
    ctx.fail_if_errors()

    model = fm.FlatModel(
        variables=tuple(variables),
        timers=tuple(sorted(system.timers, key=lambda t: t.name)),
        events=tuple(flat_events),
        types=dict(ctx.types),
        symbols=tuple(ctx.symbols),
        constants=dict(ctx.constants),
        graphs=graphs,
        properties=tuple((p.name, p.source, p.pos) for p in source.properties),
    )
    model.defines = dict(ctx.global_defines)
    if source.system is None and len(source.modules) == 1 and not source.instances:
        # Single-module models expose their module-level predicates to LTL.
        mod = source.modules[0]
        mscope = _Scope(ctx, None)
        mscope.vars = {
            v.name: (v.name, var_map[v.name].type, "local")
            for v in mod.locals
        }
        mscope.timers = {t.name: t.name for t in mod.timers}
        for d in mod.defines:
            params = tuple((p, ctx.resolve_type(ty)) for p, ty in d.params)
            dscope = _Scope(ctx, None)
            dscope.vars = mscope.vars
            dscope.timers = mscope.timers
            dscope.indices = {p: ty for p, ty in params}
            model.defines[d.name] = (params, dscope.resolve(d.body))

    checker = _TypeCheck(ctx, var_map, timer_names)
    for ev in model.events:
        checker.check_event(ev)
    ctx.fail_if_errors()
    return model


def flatten_source(text: str, strict_action_edges: bool = False) -> fm.FlatModel:
    """Parse and flatten in one step."""
    return flatten(parse_model(text), strict_action_edges=strict_action_edges)
