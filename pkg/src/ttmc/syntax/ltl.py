"""LTL property language: formula AST and parser.

Surface syntax is ASCII: ``[]`` ``<>`` ``U`` ``=>`` ``!`` ``&&`` ``||``,
``forall``/``exists`` quantifiers over declared finite types, ``mono(t)``
atoms, and event-occurrence atoms ``e(x)`` / ``e(x, y)``.  State atoms are
boolean expressions over flattened variable and timer names (which may be
dotted, e.g. ``env.loc[t]``).

A free identifier used as an array subscript or event-atom argument is
implicitly universally quantified; its set is inferred from the array's
index type or the event's index declaration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ttmc.diagnostics import NO_POS, Diagnostic, ParseError, Pos
from ttmc.syntax import ast
from ttmc.syntax.lexer import EOF, IDENT, INT, OP
from ttmc.syntax.parser import Parser, _INFIX_BP


# ── formula AST ──────────────────────────────────────────────────


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class LBool(Formula):
    value: bool


@dataclass(frozen=True)
class LAtom(Formula):
    """State/timer predicate; a boolean expression over one configuration."""

    expr: ast.Expr

    def __str__(self):
        from ttmc.syntax.pretty import pretty_expr

        return pretty_expr(self.expr)


@dataclass(frozen=True)
class LMono(Formula):
    timer: str

    def __str__(self):
        return f"mono({self.timer})"


@dataclass(frozen=True)
class LEvent(Formula):
    """Occurrence atom: the named event (with these index values) was the
    last transition taken."""

    event: str
    args: tuple[ast.Expr, ...]
    pos: Pos = field(default=NO_POS, compare=False)

    def __str__(self):
        from ttmc.syntax.pretty import pretty_expr

        return f"{self.event}({', '.join(pretty_expr(a) for a in self.args)})"


@dataclass(frozen=True)
class LNot(Formula):
    operand: Formula


@dataclass(frozen=True)
class LAnd(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class LOr(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class LImplies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class LAlways(Formula):
    operand: Formula


@dataclass(frozen=True)
class LEventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class LUntil(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class LQuant(Formula):
    kind: str  # forall | exists
    var: str
    set_name: str
    body: Formula


def walk(f: Formula):
    yield f
    for child in _children(f):
        yield from walk(child)


def _children(f: Formula):
    if isinstance(f, (LNot, LAlways, LEventually)):
        return (f.operand,)
    if isinstance(f, (LAnd, LOr, LImplies, LUntil)):
        return (f.lhs, f.rhs)
    if isinstance(f, LQuant):
        return (f.body,)
    return ()


# ── parser ───────────────────────────────────────────────────────

_FORMULA_ONLY = {"[]", "<>"}
_CMP_BP = _INFIX_BP["=="]  # atoms parse at comparison level and above


class _Resolver:
    """Name resolution context extracted from a flat model."""

    def __init__(self, model):
        self.model = model
        self.vars = set(model.var_index)
        self.timers = set(model.timer_index)
        self.events = {e.id: e for e in model.events}
        self.types = model.types
        self.constants = model.constants
        self.symbols = set(model.symbol_ids)
        self.defines = getattr(model, "defines", {})


class LtlParser(Parser):
    def __init__(self, source: str, resolver: _Resolver, base: Pos | None):
        super().__init__(source)
        self.dotted_names = True
        self.resolver = resolver
        self.base = base
        self.bound: list[str] = []  # quantifier-bound index names
        self.free: dict[str, Pos] = {}

    # Rebase formula-relative positions into the enclosing file.
    def _abs(self, pos: Pos) -> Pos:
        if self.base is None or pos == NO_POS:
            return pos
        if pos.line == 1:
            return Pos(self.base.line, self.base.col + pos.col - 1)
        return Pos(self.base.line + pos.line - 1, pos.col)

    def report(self, code, message, pos):
        super().report(code, message, self._abs(pos))

    def error(self, message, pos=None):
        self.diagnostics.append(
            Diagnostic("SyntaxError", message, self._abs(pos or self.cur().pos))
        )
        from ttmc.syntax.parser import _PError

        return _PError()

    def parse_formula(self) -> Formula:
        return self.parse_implies()

    def parse_implies(self) -> Formula:
        lhs = self.parse_or()
        if self.accept(OP, "=>") or self.accept(OP, "->"):
            return LImplies(lhs, self.parse_implies())
        return lhs

    def parse_or(self) -> Formula:
        lhs = self.parse_and()
        while self.accept(OP, "||"):
            lhs = LOr(lhs, self.parse_and())
        return lhs

    def parse_and(self) -> Formula:
        lhs = self.parse_until()
        while self.accept(OP, "&&"):
            lhs = LAnd(lhs, self.parse_until())
        return lhs

    def parse_until(self) -> Formula:
        lhs = self.parse_funary()
        if self.accept(IDENT, "U"):
            return LUntil(lhs, self.parse_until())
        return lhs

    def parse_funary(self) -> Formula:
        if self.accept(OP, "!"):
            return LNot(self.parse_funary())
        if self.accept(OP, "[]"):
            return LAlways(self.parse_funary())
        if self.accept(OP, "<>"):
            return LEventually(self.parse_funary())
        if self.at_kw("forall") or self.at_kw("exists"):
            kind = self.advance().text
            var = self.expect_name("quantified index")
            self.expect(OP, ":")
            set_tok = self.expect_name("index set name")
            if set_tok.text not in self.resolver.types:
                self.report("UnknownSet", f"unknown index set {set_tok.text!r}", set_tok.pos)
            self.expect(OP, "@")
            self.bound.append(var.text)
            body = self.parse_funary()
            self.bound.pop()
            return LQuant(kind, var.text, set_tok.text, body)
        return self.parse_fprimary()

    def parse_fprimary(self) -> Formula:
        t = self.cur()
        if self.accept(IDENT, "true"):
            return LBool(True)
        if self.accept(IDENT, "false"):
            return LBool(False)
        if t.kind == OP and t.text == "(":
            if self._paren_is_formula():
                self.advance()
                inner = self.parse_formula()
                self.expect(OP, ")")
                return inner
            return self._atom()
        if t.kind == IDENT and t.text == "mono" and self.peek().text == "(":
            self.advance()
            self.expect(OP, "(")
            name = self._dotted_name()
            self.expect(OP, ")")
            if name not in self.resolver.timers:
                self.report("UnknownAtom", f"mono() requires a timer, got {name!r}", t.pos)
            return LMono(name)
        if t.kind == IDENT and t.text not in ("true", "false"):
            # Could be an event atom: dotted name followed by '('.
            save = self.i
            name = self._dotted_name(soft=True)
            if name is not None and name in self.resolver.events and self.at(OP, "("):
                self.advance()
                args = []
                if not self.at(OP, ")"):
                    while True:
                        args.append(self._value_expr())
                        if not self.accept(OP, ","):
                            break
                self.expect(OP, ")")
                ev = self.resolver.events[name]
                nf, nd = len(ev.f_ind), len(ev.d_ind)
                if len(args) not in (nf, nf + nd):
                    self.report(
                        "ArityError",
                        f"event {name!r} takes {nf} fair"
                        + (f" (+{nd} demonic)" if nd else "")
                        + f" indices, got {len(args)}",
                        t.pos,
                    )
                return LEvent(name, tuple(args), pos=self._abs(t.pos))
            self.i = save
            return self._atom()
        return self._atom()

    def _paren_is_formula(self) -> bool:
        """Look inside the parenthesized span for formula-only syntax."""
        depth = 0
        j = self.i
        while j < len(self.tokens):
            tok = self.tokens[j]
            if tok.kind == OP and tok.text in ("(", "[", "{"):
                depth += 1
            elif tok.kind == OP and tok.text in (")", "]", "}"):
                depth -= 1
                if depth == 0:
                    return False
            elif tok.kind == OP and tok.text in _FORMULA_ONLY:
                return True
            elif tok.kind == IDENT and tok.text in ("U", "forall", "exists", "mono"):
                return True
            elif tok.kind == IDENT and tok.text in self.resolver.events:
                nxt = self.tokens[j + 1] if j + 1 < len(self.tokens) else None
                if nxt is not None and nxt.kind == OP and nxt.text == "(":
                    return True
            j += 1
        return False

    def _dotted_name(self, soft: bool = False) -> str | None:
        if self.cur().kind != IDENT:
            if soft:
                return None
            raise self.error("expected a name")
        parts = [self.advance().text]
        while (
            self.at(OP, ".")
            and self.peek().kind == IDENT
            and not (
                self.peek().text in ("Count", "First")
                and self.peek(2).kind == OP
                and self.peek(2).text == "("
            )
        ):
            self.advance()
            parts.append(self.advance().text)
        return ".".join(parts)

    def _value_expr(self) -> ast.Expr:
        expr = self.parse_expr(_CMP_BP + 1)
        return self._resolve_expr(expr, subscript_ty=None)

    def _atom(self) -> Formula:
        t = self.cur()
        expr = self.parse_expr(_CMP_BP)
        expr = self._resolve_expr(expr, subscript_ty=None)
        if isinstance(expr, ast.BoolLit):
            return LBool(expr.value)
        _reject_primes(expr, self)
        return LAtom(expr)

    # Rewrite names: join dotted refs, fold constants, track free indices.
    def _resolve_expr(self, e: ast.Expr, subscript_ty) -> ast.Expr:
        r = self.resolver
        if isinstance(e, ast.Name):
            if e.name in self.bound or e.name in r.vars or e.name in r.timers:
                return e
            if e.name in r.constants:
                return ast.IntLit(r.constants[e.name], pos=e.pos)
            if e.name in r.symbols:
                return e
            # Unknown: a candidate free index, legal only where a set is
            # inferable (array subscripts, event arguments, comparisons).
            self.free.setdefault(e.name, self._abs(e.pos))
            return e
        if isinstance(e, ast.IndexExpr):
            return ast.IndexExpr(
                self._resolve_expr(e.base, None),
                self._resolve_expr(e.index, None),
                pos=e.pos,
            )
        if isinstance(e, ast.Unary):
            return ast.Unary(e.op, self._resolve_expr(e.operand, None), pos=e.pos)
        if isinstance(e, ast.Binary):
            return ast.Binary(
                e.op,
                self._resolve_expr(e.lhs, None),
                self._resolve_expr(e.rhs, None),
                pos=e.pos,
            )
        if isinstance(e, ast.Fold):
            self.bound.append(e.var)
            body = self._resolve_expr(e.body, None)
            self.bound.pop()
            return ast.Fold(e.op, e.var, e.set_type, body, pos=e.pos)
        if isinstance(e, ast.Call):
            if e.name not in r.defines:
                self.report("UnknownAtom", f"unknown predicate {e.name!r}", e.pos)
                return ast.BoolLit(True, pos=e.pos)
            params, body = r.defines[e.name]
            if len(params) != len(e.args):
                self.report(
                    "ArityError",
                    f"predicate {e.name!r} takes {len(params)} arguments",
                    e.pos,
                )
                return ast.BoolLit(True, pos=e.pos)
            args = [self._resolve_expr(a, None) for a in e.args]
            return _substitute(body, dict(zip([p for p, _ in params], args)))
        return e


def _reject_primes(e: ast.Expr, parser: LtlParser) -> None:
    from ttmc.syntax.parser import _primes

    for p in _primes(e):
        parser.report(
            "SyntaxError", "primed references are not allowed in properties", p.pos
        )


def _substitute(e: ast.Expr, mapping: dict[str, ast.Expr]) -> ast.Expr:
    if isinstance(e, ast.Name) and e.name in mapping:
        return mapping[e.name]
    if isinstance(e, ast.Unary):
        return ast.Unary(e.op, _substitute(e.operand, mapping), pos=e.pos)
    if isinstance(e, ast.Binary):
        return ast.Binary(
            e.op, _substitute(e.lhs, mapping), _substitute(e.rhs, mapping), pos=e.pos
        )
    if isinstance(e, ast.IndexExpr):
        return ast.IndexExpr(
            _substitute(e.base, mapping), _substitute(e.index, mapping), pos=e.pos
        )
    if isinstance(e, ast.Fold):
        inner = {k: v for k, v in mapping.items() if k != e.var}
        return ast.Fold(e.op, e.var, e.set_type, _substitute(e.body, inner), pos=e.pos)
    if isinstance(e, ast.Call):
        return ast.Call(e.name, tuple(_substitute(a, mapping) for a in e.args), pos=e.pos)
    return e


# ── free index inference ─────────────────────────────────────────


def _infer_free_sets(formula: Formula, resolver: _Resolver, free: dict[str, Pos]):
    """Determine the index set of each free identifier from how it is used."""
    from ttmc.elaborate import model as em

    inferred: dict[str, str] = {}

    def type_name_of(t) -> str | None:
        for name, ty in resolver.types.items():
            if ty == t:
                return name
        return None

    def scan_expr(e: ast.Expr):
        if isinstance(e, ast.IndexExpr) and isinstance(e.index, ast.Name):
            ix = e.index.name
            if ix in free and ix not in inferred:
                base = e.base
                if isinstance(base, ast.Name) and base.name in resolver.vars:
                    vt = resolver.model.var(base.name).type
                    if isinstance(vt, em.TArray):
                        name = type_name_of(vt.index)
                        if name:
                            inferred[ix] = name
        for child in _expr_children(e):
            scan_expr(child)

    for node in walk(formula):
        if isinstance(node, LAtom):
            scan_expr(node.expr)
        elif isinstance(node, LEvent):
            ev = resolver.events.get(node.event)
            if ev is None:
                continue
            kinds = list(ev.f_ind) + list(ev.d_ind)
            for arg, (_, ty) in zip(node.args, kinds):
                if isinstance(arg, ast.Name) and arg.name in free:
                    if arg.name not in inferred:
                        name = type_name_of(ty)
                        if name:
                            inferred[arg.name] = name
                scan_expr(arg)
    return inferred


def _expr_children(e: ast.Expr):
    if isinstance(e, ast.Unary):
        return (e.operand,)
    if isinstance(e, ast.Binary):
        return (e.lhs, e.rhs)
    if isinstance(e, ast.IndexExpr):
        return (e.base, e.index)
    if isinstance(e, ast.Fold):
        return (e.body,)
    if isinstance(e, ast.Call):
        return e.args
    return ()


# ── entry points ─────────────────────────────────────────────────


def parse_ltl(source: str, model, base_pos: Pos | None = None) -> Formula:
    """Parse one LTL formula against a flattened model.

    Free index identifiers are closed under an implicit top-level forall.
    Raises :class:`ParseError` carrying positioned diagnostics on failure.
    """
    resolver = _Resolver(model)
    parser = LtlParser(source, resolver, base_pos)
    from ttmc.syntax.parser import _PError

    try:
        formula = parser.parse_formula()
        if not parser.at(EOF):
            parser.report(
                "SyntaxError",
                f"unexpected trailing input {parser.cur().text!r}",
                parser.cur().pos,
            )
    except _PError:
        formula = LBool(True)
    if not parser.diagnostics:
        inferred = _infer_free_sets(formula, resolver, parser.free)
        for name in sorted(parser.free, key=lambda n: (parser.free[n].line, parser.free[n].col)):
            if name not in inferred:
                parser.diagnostics.append(
                    Diagnostic(
                        "UnknownAtom",
                        f"unknown name {name!r} (not a variable, timer, constant, "
                        "symbol, or inferable index)",
                        parser.free[name],
                    )
                )
        for name in sorted(inferred, key=lambda n: (parser.free[n].line, parser.free[n].col), reverse=True):
            formula = LQuant("forall", name, inferred[name], formula)
    if parser.diagnostics:
        raise ParseError(parser.diagnostics)
    return formula


def parse_property_file(text: str) -> list[tuple[str, str, Pos]]:
    """Sidecar .ltl format: one ``name : formula`` per non-comment line."""
    out: list[tuple[str, str, Pos]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("--", 1)[0].rstrip()
        if not line.strip():
            continue
        if ":" not in line:
            raise ParseError(
                [Diagnostic("SyntaxError", "expected 'name : formula'", Pos(lineno, 1))]
            )
        name, formula = line.split(":", 1)
        col = line.index(":") + 2
        out.append((name.strip(), formula.strip(), Pos(lineno, col)))
    return out
