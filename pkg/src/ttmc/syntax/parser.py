"""Recursive-descent parser for .ttm model files.

Parsing is total: malformed input produces positioned diagnostics, never an
exception.  ``parse`` returns ``(model, diagnostics)``; the model is None
whenever any diagnostic was reported.  Expression parsing uses precedence
climbing with conventional C-family ordering (``=>`` lowest).
"""

from __future__ import annotations

from ttmc.diagnostics import Diagnostic, ParseError, Pos
from ttmc.syntax import ast
from ttmc.syntax.lexer import EOF, IDENT, INT, OP, Token, lex

KEYWORDS = {
    "module", "end", "events", "locals", "timers", "depends", "instances",
    "types", "constants", "globals", "properties", "define", "system",
    "when", "start", "stop", "do", "skip", "if", "then", "elseif", "else",
    "fi", "sync", "as", "with", "just", "compassionate", "fair",
    "in", "out", "share", "queue", "array", "of", "bool", "true", "false",
    "call", "mod",
}

MODES = ("in", "out", "share")

# Binding powers for infix operators; right-associative ones noted below.
_INFIX_BP = {
    "=>": 10, "->": 10,
    "||": 20,
    "&&": 30,
    "==": 40, "!=": 40,
    "<": 50, "<=": 50, ">": 50, ">=": 50,
    "+": 60, "-": 60,
    "*": 70, "/": 70, "mod": 70,
}
_RIGHT_ASSOC = {"=>", "->"}
_UNARY_BP = 80

_TOP_KEYWORDS = {
    "types", "constants", "globals", "define", "module", "instances",
    "system", "properties",
}


class _PError(Exception):
    """Internal signal: a diagnostic was recorded, synchronize and go on."""


class Parser:
    def __init__(self, source: str) -> None:
        self.source = source
        self.tokens, self.diagnostics = lex(source)
        self.i = 0
        self.dotted_names = False  # property language allows `inst.var` refs
        self.line_starts = [0]
        for k, ch in enumerate(source):
            if ch == "\n":
                self.line_starts.append(k + 1)

    # ── token plumbing ──────────────────────────────────────────

    def cur(self) -> Token:
        return self.tokens[self.i]

    def peek(self, off: int = 1) -> Token:
        j = min(self.i + off, len(self.tokens) - 1)
        return self.tokens[j]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.cur()
        return t.kind == kind and (text is None or t.text == text)

    def at_kw(self, word: str) -> bool:
        return self.at(IDENT, word)

    def advance(self) -> Token:
        t = self.cur()
        if t.kind != EOF:
            self.i += 1
        return t

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.advance()
        return None

    def error(self, message: str, pos: Pos | None = None) -> _PError:
        self.diagnostics.append(
            Diagnostic("SyntaxError", message, pos or self.cur().pos)
        )
        return _PError()

    def report(self, code: str, message: str, pos: Pos) -> None:
        self.diagnostics.append(Diagnostic(code, message, pos))

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            want = text if text is not None else kind
            got = self.cur().text or "end of input"
            raise self.error(f"expected {want!r}, found {got!r}")
        return tok

    def expect_name(self, what: str = "identifier") -> Token:
        t = self.cur()
        if t.kind != IDENT:
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        if t.text in KEYWORDS:
            raise self.error(f"expected {what}, found keyword {t.text!r}")
        return self.advance()

    def offset_of(self, tok: Token) -> int:
        return self.line_starts[tok.pos.line - 1] + tok.pos.col - 1

    def _sync_to(self, *stops: str) -> None:
        depth = 0
        while not self.at(EOF):
            t = self.cur()
            if t.kind == OP and t.text in "([{":
                depth += 1
            elif t.kind == OP and t.text in ")]}":
                depth = max(0, depth - 1)
            elif depth == 0 and (
                (t.kind == OP and t.text in stops)
                or (t.kind == IDENT and t.text in stops)
            ):
                return
            self.advance()

    # ── top level ───────────────────────────────────────────────

    def parse_file(self) -> ast.SourceModel:
        types: list[ast.TypeDecl] = []
        constants: list[ast.ConstDecl] = []
        globs: list[ast.VarDecl] = []
        defines: list[ast.DefineDecl] = []
        modules: list[ast.ModuleDecl] = []
        instances: list[ast.InstanceDecl] = []
        renames: list[ast.RenameDecl] = []
        system: ast.CompExpr | None = None
        properties: list[ast.PropertyDecl] = []

        while not self.at(EOF):
            try:
                if self.at_kw("types"):
                    types.extend(self.block_items(self.parse_type_decl))
                elif self.at_kw("constants"):
                    constants.extend(self.block_items(self.parse_const_decl))
                elif self.at_kw("globals"):
                    globs.extend(self.block_items(self.parse_var_decl))
                elif self.at_kw("define"):
                    defines.append(self.parse_define())
                elif self.at_kw("module"):
                    modules.append(self.parse_module())
                elif self.at_kw("instances"):
                    instances.extend(self.block_items(self.parse_instance))
                elif self.at_kw("system"):
                    self.advance()
                    self.expect(OP, "=")
                    system = self.parse_comp_expr()
                elif self.at_kw("properties"):
                    properties.extend(self.block_items(self.parse_property))
                elif self.at(IDENT) and self.peek().kind == OP and self.peek().text == "::=":
                    renames.append(self.parse_rename())
                else:
                    raise self.error(
                        f"expected a top-level declaration, found {self.cur().text!r}"
                    )
            except _PError:
                self._sync_to(*_TOP_KEYWORDS)
        return ast.SourceModel(
            types=tuple(types),
            constants=tuple(constants),
            globals=tuple(globs),
            defines=tuple(defines),
            modules=tuple(modules),
            instances=tuple(instances),
            renames=tuple(renames),
            system=system,
            properties=tuple(properties),
        )

    def block_items(self, item_parser):
        """``<kw> item ;? item ;? ... end`` with per-item recovery."""
        self.advance()  # block keyword
        items = []
        while not self.at_kw("end") and not self.at(EOF):
            try:
                items.append(item_parser())
            except _PError:
                self._sync_to(";", "end")
            self.accept(OP, ";")
        self.expect(IDENT, "end")
        return items

    # ── simple declarations ─────────────────────────────────────

    def parse_type_decl(self) -> ast.TypeDecl:
        name = self.expect_name("type name")
        self.expect(OP, "=")
        ty = self.parse_type_expr()
        return ast.TypeDecl(name.text, ty, pos=name.pos)

    def parse_const_decl(self) -> ast.ConstDecl:
        name = self.expect_name("constant name")
        self.expect(OP, "=")
        value = self.parse_expr()
        return ast.ConstDecl(name.text, value, pos=name.pos)

    def parse_var_decl(self) -> ast.VarDecl:
        name = self.expect_name("variable name")
        self.expect(OP, ":")
        ty = self.parse_type_expr()
        init = None
        if self.accept(OP, ":="):
            init = self.parse_expr()
        return ast.VarDecl(name.text, ty, init, pos=name.pos)

    def parse_define(self) -> ast.DefineDecl:
        pos = self.expect(IDENT, "define").pos
        name = self.expect_name("predicate name")
        self.expect(OP, "(")
        params = []
        if not self.at(OP, ")"):
            while True:
                pname = self.expect_name("parameter name")
                self.expect(OP, ":")
                params.append((pname.text, self.parse_type_expr()))
                if not self.accept(OP, ","):
                    break
        self.expect(OP, ")")
        self.expect(OP, "==")
        body = self.parse_expr()
        return ast.DefineDecl(name.text, tuple(params), body, pos=pos)

    # ── types ───────────────────────────────────────────────────

    def parse_type_expr(self) -> ast.TypeExpr:
        t = self.cur()
        if self.accept(IDENT, "bool"):
            return ast.BoolType(pos=t.pos)
        if self.accept(IDENT, "array"):
            index = self.parse_type_expr()
            self.expect(IDENT, "of")
            elem = self.parse_type_expr()
            return ast.ArrayType(index, elem, pos=t.pos)
        if self.accept(IDENT, "queue"):
            self.expect(OP, "[")
            elem = self.parse_type_expr()
            self.expect(OP, "]")
            self.expect(OP, "(")
            cap = self.parse_expr()
            self.expect(OP, ")")
            return ast.QueueType(elem, cap, pos=t.pos)
        if self.accept(OP, "{"):
            members = []
            if not self.at(OP, "}"):
                while True:
                    members.append(self.parse_expr())
                    if not self.accept(OP, ","):
                        break
            self.expect(OP, "}")
            return ast.EnumType(tuple(members), pos=t.pos)
        # Either a bare type name or a constant range `lo .. hi`.
        lo = self.parse_expr(_INFIX_BP["+"])
        if self.accept(OP, ".."):
            hi = self.parse_expr(_INFIX_BP["+"])
            return ast.RangeType(lo, hi, pos=t.pos)
        if isinstance(lo, ast.Name):
            return ast.TypeName(lo.name, pos=lo.pos)
        raise self.error("expected a type", t.pos)

    # ── module ──────────────────────────────────────────────────

    def parse_module(self) -> ast.ModuleDecl:
        pos = self.expect(IDENT, "module").pos
        name = self.expect_name("module name")
        params: list[ast.ParamDecl] = []
        self.expect(OP, "(")
        if not self.at(OP, ")"):
            while True:
                mode = self.cur()
                if mode.kind != IDENT or mode.text not in MODES:
                    raise self.error("expected parameter mode (in, out, or share)")
                self.advance()
                pname = self.expect_name("parameter name")
                self.expect(OP, ":")
                ty = self.parse_type_expr()
                params.append(ast.ParamDecl(mode.text, pname.text, ty, pos=mode.pos))
                if not self.accept(OP, ","):
                    break
        self.expect(OP, ")")

        depends: list[ast.DependsDecl] = []
        locs: list[ast.VarDecl] = []
        timers: list[ast.TimerDecl] = []
        defines: list[ast.DefineDecl] = []
        events: list[ast.EventDecl] = []
        while not self.at_kw("end") and not self.at(EOF):
            try:
                if self.at_kw("depends"):
                    depends.extend(self.block_items(self.parse_depends))
                elif self.at_kw("locals"):
                    locs.extend(self.block_items(self.parse_var_decl))
                elif self.at_kw("timers"):
                    timers.extend(self.block_items(self.parse_timer_decl))
                elif self.at_kw("define"):
                    defines.append(self.parse_define())
                elif self.at_kw("events"):
                    events.extend(self.block_items(self.parse_event))
                else:
                    raise self.error(
                        f"expected a module section, found {self.cur().text!r}"
                    )
            except _PError:
                self._sync_to("depends", "locals", "timers", "define", "events", "end")
        self.expect(IDENT, "end")
        return ast.ModuleDecl(
            name.text, tuple(params), tuple(depends), tuple(locs),
            tuple(timers), tuple(defines), tuple(events), pos=pos,
        )

    def parse_depends(self) -> ast.DependsDecl:
        slot = self.expect_name("dependency slot name")
        self.expect(OP, ":")
        module = self.expect_name("module name")
        return ast.DependsDecl(slot.text, module.text, pos=slot.pos)

    def parse_timer_decl(self) -> ast.TimerDecl:
        name = self.expect_name("timer name")
        self.expect(OP, ":")
        lo = self.expect(INT)
        if lo.text != "0":
            self.report("BoundError", "timer ranges must start at 0", lo.pos)
        self.expect(OP, "..")
        bound = self.parse_expr(_INFIX_BP["+"])
        init = None
        if self.accept(OP, ":="):
            init = self.parse_expr()
        return ast.TimerDecl(name.text, bound, init, pos=name.pos)

    # ── events ──────────────────────────────────────────────────

    def parse_event(self) -> ast.EventDecl:
        name = self.expect_name("event name")
        indices: list[ast.IndexDecl] = []
        if self.accept(OP, "("):
            while True:
                iname = self.expect_name("index name")
                self.expect(OP, ":")
                fair = self.accept(IDENT, "fair") is not None
                ty = self.parse_type_expr()
                indices.append(ast.IndexDecl(iname.text, fair, ty, pos=iname.pos))
                if not self.accept(OP, ";"):
                    break
            self.expect(OP, ")")

        bounds: tuple[ast.Expr, ast.Expr | None] | None = None
        if self.at(OP, "["):
            bpos = self.advance().pos
            lower = self.parse_expr()
            self.expect(OP, ",")
            if self.accept(OP, "*"):
                upper = None
            else:
                upper = self.parse_expr()
            self.expect(OP, "]")
            bounds = (lower, upper)
            self._check_bounds(bounds, bpos)

        fairness = "spontaneous"
        if self.at_kw("just") or self.at_kw("compassionate"):
            ftok = self.advance()
            fairness = ftok.text
            if bounds is not None and bounds[1] is not None:
                self.report(
                    "BoundError",
                    f"{fairness!r} requires an unbounded upper time bound",
                    ftok.pos,
                )

        sync = None
        if self.at_kw("sync"):
            spos = self.advance().pos
            targets = []
            while True:
                slot = self.expect_name("dependency slot")
                self.expect(OP, ".")
                ev = self.expect_name("event name")
                targets.append((slot.text, ev.text))
                if not self.accept(OP, ","):
                    break
            self.expect(IDENT, "as")
            as_name = self.expect_name("compound event name")
            sync = ast.SyncClause(tuple(targets), as_name.text, pos=spos)

        guard = None
        if self.accept(IDENT, "when"):
            guard = self.parse_expr()
        start: list[str] = []
        if self.accept(IDENT, "start"):
            start = self._name_list()
        stop: list[str] = []
        if self.accept(IDENT, "stop"):
            stop = self._name_list()
        action: tuple[ast.Stmt, ...] = ()
        if self.accept(IDENT, "do"):
            action = self.parse_stmts()
        self.expect(IDENT, "end")
        return ast.EventDecl(
            name.text, tuple(indices), bounds, fairness, sync, guard,
            tuple(start), tuple(stop), action, pos=name.pos,
        )

    def _check_bounds(self, bounds, pos: Pos) -> None:
        lower, upper = bounds
        if upper is None:
            return
        if isinstance(lower, ast.IntLit) and isinstance(upper, ast.IntLit):
            if lower.value > upper.value:
                self.report(
                    "BoundError",
                    f"lower time bound {lower.value} exceeds upper bound {upper.value}",
                    pos,
                )

    def _name_list(self) -> list[str]:
        names = [self.expect_name().text]
        while self.accept(OP, ","):
            names.append(self.expect_name().text)
        return names

    # ── statements ──────────────────────────────────────────────

    def parse_stmts(self) -> tuple[ast.Stmt, ...]:
        stmts = [self.parse_stmt()]
        while self.accept(OP, ","):
            stmts.append(self.parse_stmt())
        return tuple(stmts)

    def parse_stmt(self) -> ast.Stmt:
        t = self.cur()
        if self.accept(IDENT, "skip"):
            return ast.SkipStmt(pos=t.pos)
        if self.accept(IDENT, "if"):
            branches = []
            cond = self.parse_expr()
            self.expect(IDENT, "then")
            branches.append((cond, self.parse_stmts()))
            while self.accept(IDENT, "elseif"):
                cond = self.parse_expr()
                self.expect(IDENT, "then")
                branches.append((cond, self.parse_stmts()))
            orelse: tuple[ast.Stmt, ...] = ()
            if self.accept(IDENT, "else"):
                orelse = self.parse_stmts()
            self.expect(IDENT, "fi")
            return ast.IfStmt(tuple(branches), orelse, pos=t.pos)

        name = self.expect_name("assignment target")
        if self.at(OP, ".") and self.peek().kind == IDENT:
            self.advance()
            op = self.expect_name("queue operation")
            if op.text not in ("Enqueue", "Dequeue"):
                raise self.error(
                    f"unknown queue operation {op.text!r} (expected Enqueue or Dequeue)",
                    op.pos,
                )
            self.expect(OP, "(")
            arg = None
            if op.text == "Enqueue":
                arg = self.parse_expr()
            self.expect(OP, ")")
            return ast.QueueStmt(name.text, op.text, arg, pos=t.pos)

        target: ast.Expr = ast.Name(name.text, pos=name.pos)
        if self.accept(OP, "["):
            index = self.parse_expr()
            self.expect(OP, "]")
            target = ast.IndexExpr(target, index, pos=name.pos)
        if self.accept(OP, ":="):
            return ast.Assign(target, self.parse_expr(), pos=t.pos)
        if self.accept(OP, "::"):
            return ast.DemonicAssign(target, self.parse_demonic_range(), pos=t.pos)
        raise self.error("expected ':=' or '::' in statement")

    def parse_demonic_range(self) -> ast.DemonicRange:
        t = self.cur()
        array = self.accept(IDENT, "array") is not None
        if self.at(OP, "{"):
            elem = self.parse_type_expr()
        else:
            lo = self.parse_expr(_INFIX_BP["+"])
            if self.accept(OP, ".."):
                hi = self.parse_expr(_INFIX_BP["+"])
                elem = ast.RangeType(lo, hi, pos=t.pos)
            elif isinstance(lo, ast.Name):
                elem = ast.TypeName(lo.name, pos=lo.pos)
            else:
                raise self.error("expected a finite range, set, or type name", t.pos)
        return ast.DemonicRange(elem, array, pos=t.pos)

    # ── instances / composition / properties ────────────────────

    def parse_instance(self) -> ast.InstanceDecl:
        name = self.expect_name("instance name")
        self.expect(OP, "=")
        module = self.expect_name("module name")
        self.expect(OP, "(")
        args = self.parse_instance_args()
        self.expect(OP, ")")
        with_bindings: list[tuple[str, str]] = []
        if self.accept(IDENT, "with"):
            while True:
                slot = self.expect_name("dependency slot")
                self.expect(OP, ":=")
                inst = self.expect_name("instance name")
                with_bindings.append((slot.text, inst.text))
                if not self.accept(OP, ","):
                    break
            self.expect(IDENT, "end")
        return ast.InstanceDecl(
            name.text, module.text, tuple(args), tuple(with_bindings), pos=name.pos
        )

    def parse_instance_args(self) -> list[ast.InstanceArg]:
        args: list[ast.InstanceArg] = []
        if self.at(OP, ")"):
            return args
        while True:
            mode = self.cur()
            if mode.kind != IDENT or mode.text not in MODES:
                raise self.error("expected argument mode (in, out, or share)")
            self.advance()
            value = self.parse_expr()
            args.append(ast.InstanceArg(mode.text, value, pos=mode.pos))
            if not self.accept(OP, ","):
                break
        return args

    def parse_rename(self) -> ast.RenameDecl:
        name = self.expect_name("instance group name")
        self.expect(OP, "::=")
        insts = [self.expect_name("instance name").text]
        while self.accept(OP, "||"):
            insts.append(self.expect_name("instance name").text)
        return ast.RenameDecl(name.text, tuple(insts), pos=name.pos)

    def parse_comp_expr(self) -> ast.CompExpr:
        t = self.cur()
        if self.accept(OP, "||"):
            var = self.expect_name("iteration index")
            self.expect(OP, ":")
            ty = self.parse_type_expr()
            self.expect(OP, "@")
            module = self.expect_name("module name")
            self.expect(OP, "(")
            args = self.parse_instance_args()
            self.expect(OP, ")")
            return ast.CompIter(var.text, ty, module.text, tuple(args), pos=t.pos)
        expr = self.parse_comp_term()
        while self.accept(OP, "||"):
            right = self.parse_comp_term()
            expr = ast.CompPar(expr, right, pos=t.pos)
        return expr

    def parse_comp_term(self) -> ast.CompExpr:
        if self.accept(OP, "("):
            inner = self.parse_comp_expr()
            self.expect(OP, ")")
            return inner
        name = self.expect_name("instance name")
        return ast.CompName(name.text, pos=name.pos)

    def parse_property(self) -> ast.PropertyDecl:
        name = self.expect_name("property name")
        self.expect(OP, ":")
        start_tok = self.cur()
        depth = 0
        last_tok = None
        while not self.at(EOF):
            t = self.cur()
            if t.kind == OP and t.text in "([{":
                depth += 1
            elif t.kind == OP and t.text in ")]}":
                depth -= 1
            elif depth == 0 and (
                (t.kind == OP and t.text == ";") or (t.kind == IDENT and t.text == "end")
            ):
                break
            last_tok = self.advance()
        if last_tok is None:
            raise self.error("empty property formula", start_tok.pos)
        begin = self.offset_of(start_tok)
        stop = self.offset_of(last_tok) + len(last_tok.text)
        return ast.PropertyDecl(
            name.text, self.source[begin:stop].strip(), pos=start_tok.pos
        )

    # ── expressions ─────────────────────────────────────────────

    def parse_expr(self, min_bp: int = 0) -> ast.Expr:
        lhs = self.parse_unary()
        while True:
            t = self.cur()
            op = None
            if t.kind == OP and t.text in _INFIX_BP:
                op = t.text
            elif t.kind == IDENT and t.text == "mod":
                op = "mod"
            if op is None:
                return lhs
            bp = _INFIX_BP[op]
            if bp < min_bp:
                return lhs
            self.advance()
            next_bp = bp if op in _RIGHT_ASSOC else bp + 1
            rhs = self.parse_expr(next_bp)
            if op == "->":
                op = "=>"
            lhs = ast.Binary(op, lhs, rhs, pos=t.pos)

    def parse_unary(self) -> ast.Expr:
        t = self.cur()
        if self.accept(OP, "!"):
            return ast.Unary("!", self.parse_unary(), pos=t.pos)
        if self.accept(OP, "-"):
            operand = self.parse_unary()
            if isinstance(operand, ast.IntLit):
                return ast.IntLit(-operand.value, pos=t.pos)
            return ast.Unary("-", operand, pos=t.pos)
        return self.parse_postfix()

    def parse_postfix(self) -> ast.Expr:
        expr = self.parse_primary()
        while True:
            if self.at(OP, "["):
                self.advance()
                index = self.parse_expr()
                self.expect(OP, "]")
                expr = ast.IndexExpr(expr, index, pos=self.cur().pos)
            elif (
                self.at(OP, ".")
                and isinstance(expr, ast.Name)
                and self.peek().kind == IDENT
                and self.peek().text in ("Count", "First")
                and self.peek(2).kind == OP
                and self.peek(2).text == "("
            ):
                self.advance()
                op = self.advance()
                self.expect(OP, "(")
                self.expect(OP, ")")
                expr = ast.QueueOp(expr.name, op.text, pos=op.pos)
            else:
                return expr

    def parse_primary(self) -> ast.Expr:
        t = self.cur()
        if t.kind == INT:
            self.advance()
            return ast.IntLit(int(t.text), pos=t.pos)
        if self.accept(IDENT, "true"):
            return ast.BoolLit(True, pos=t.pos)
        if self.accept(IDENT, "false"):
            return ast.BoolLit(False, pos=t.pos)
        if self.accept(IDENT, "call"):
            self.expect(OP, "(")
            fname = self.expect_name("predicate name")
            args = []
            while self.accept(OP, ","):
                args.append(self.parse_expr())
            self.expect(OP, ")")
            return ast.Call(fname.text, tuple(args), pos=t.pos)
        if self.accept(OP, "("):
            # A parenthesis opening with && or || starts a quantifier fold.
            if self.at(OP, "&&") or self.at(OP, "||"):
                op = self.advance().text
                var = self.expect_name("fold index")
                self.expect(OP, ":")
                ty = self.parse_type_expr()
                self.expect(OP, "@")
                body = self.parse_expr()
                self.expect(OP, ")")
                return ast.Fold(op, var.text, ty, body, pos=t.pos)
            inner = self.parse_expr()
            self.expect(OP, ")")
            return inner
        if t.kind == IDENT and t.text not in KEYWORDS:
            self.advance()
            name = t.text
            while (
                self.dotted_names
                and self.at(OP, ".")
                and self.peek().kind == IDENT
                and self.peek().text not in KEYWORDS
                and not (
                    self.peek().text in ("Count", "First")
                    and self.peek(2).kind == OP
                    and self.peek(2).text == "("
                )
            ):
                self.advance()
                name += "." + self.advance().text
            if self.accept(OP, "'"):
                return ast.PrimedName(name, pos=t.pos)
            return ast.Name(name, pos=t.pos)
        raise self.error(f"expected an expression, found {t.text or 'end of input'!r}")


# ── whole-file validation ────────────────────────────────────────


def _validate(model: ast.SourceModel, out: list[Diagnostic]) -> None:
    def dup_check(names, kind):
        seen: dict[str, Pos] = {}
        for name, pos in names:
            if name in seen:
                out.append(
                    Diagnostic("DuplicateName", f"duplicate {kind} {name!r}", pos)
                )
            seen[name] = pos

    dup_check([(m.name, m.pos) for m in model.modules], "module")
    dup_check([(i.name, i.pos) for i in model.instances], "instance")
    dup_check([(t.name, t.pos) for t in model.types], "type")
    dup_check([(c.name, c.pos) for c in model.constants], "constant")
    dup_check([(g.name, g.pos) for g in model.globals], "global variable")
    dup_check([(p.name, p.pos) for p in model.properties], "property")

    for g in model.globals:
        if g.init is not None:
            for p in _primes(g.init):
                out.append(
                    Diagnostic(
                        "SyntaxError",
                        "primed references are not allowed in initial values",
                        p.pos,
                    )
                )

    for m in model.modules:
        dup_check([(e.name, e.pos) for e in m.events], f"event in module {m.name}")
        dup_check([(d.slot, d.pos) for d in m.depends], f"dependency slot in {m.name}")
        scope = (
            [(p.name, p.pos) for p in m.params]
            + [(v.name, v.pos) for v in m.locals]
            + [(tm.name, tm.pos) for tm in m.timers]
        )
        dup_check(scope, f"declaration in module {m.name}")
        scope_names = {n for n, _ in scope}
        for e in m.events:
            dup_check([(ix.name, ix.pos) for ix in e.indices], f"index of event {e.name}")
            for ix in e.indices:
                if ix.name in scope_names:
                    out.append(
                        Diagnostic(
                            "DuplicateName",
                            f"index {ix.name!r} shadows a variable or timer in scope",
                            ix.pos,
                        )
                    )
            for v in m.locals:
                if v.init is not None:
                    for p in _primes(v.init):
                        out.append(
                            Diagnostic(
                                "SyntaxError",
                                "primed references are not allowed in initial values",
                                p.pos,
                            )
                        )

    # Composition references must resolve to declared instances or to a
    # ::= rename group.
    inst_names = {i.name for i in model.instances}
    group_names = {r.name for r in model.renames}

    def comp_refs(c: ast.CompExpr):
        if isinstance(c, ast.CompName):
            yield c
        elif isinstance(c, ast.CompPar):
            yield from comp_refs(c.left)
            yield from comp_refs(c.right)

    if model.system is not None:
        for ref in comp_refs(model.system):
            if ref.name not in inst_names and ref.name not in group_names:
                out.append(
                    Diagnostic(
                        "UnknownReference",
                        f"composition references undeclared instance {ref.name!r}",
                        ref.pos,
                    )
                )
    for r in model.renames:
        for name in r.instances:
            if name not in inst_names:
                out.append(
                    Diagnostic(
                        "UnknownReference",
                        f"rename references undeclared instance {name!r}",
                        r.pos,
                    )
                )


def _primes(e: ast.Expr):
    if isinstance(e, ast.PrimedName):
        yield e
    elif isinstance(e, ast.Unary):
        yield from _primes(e.operand)
    elif isinstance(e, ast.Binary):
        yield from _primes(e.lhs)
        yield from _primes(e.rhs)
    elif isinstance(e, ast.IndexExpr):
        yield from _primes(e.base)
        yield from _primes(e.index)
    elif isinstance(e, ast.Fold):
        yield from _primes(e.body)
    elif isinstance(e, ast.Call):
        for a in e.args:
            yield from _primes(a)


def parse(source: str) -> tuple[ast.SourceModel | None, list[Diagnostic]]:
    """Parse a .ttm source text.  Returns the AST and a diagnostic list;
    the AST is None whenever any diagnostic was reported."""
    parser = Parser(source)
    model = parser.parse_file()
    diagnostics = parser.diagnostics
    if not diagnostics:
        _validate(model, diagnostics)
    return (model if not diagnostics else None), diagnostics


def parse_model(source: str) -> ast.SourceModel:
    """Like :func:`parse` but raises :class:`ParseError` on any diagnostic."""
    model, diagnostics = parse(source)
    if model is None:
        raise ParseError(diagnostics)
    return model
