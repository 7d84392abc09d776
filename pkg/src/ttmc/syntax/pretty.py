"""Canonical text rendering of the AST.

``parse(pretty_model(parse(s)))`` yields a structurally identical AST for
every well-formed source, which the test suite checks over the bundled
corpus.  Expressions are re-parenthesized from precedence, not from the
original text.
"""

from __future__ import annotations

from ttmc.syntax import ast

_PREC = {
    "=>": 10, "||": 20, "&&": 30,
    "==": 40, "!=": 40,
    "<": 50, "<=": 50, ">": 50, ">=": 50,
    "+": 60, "-": 60,
    "*": 70, "/": 70, "mod": 70,
}


def pretty_expr(e: ast.Expr, parent_prec: int = 0) -> str:
    if isinstance(e, ast.IntLit):
        return str(e.value)
    if isinstance(e, ast.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, ast.Name):
        return e.name
    if isinstance(e, ast.PrimedName):
        return f"{e.name}'"
    if isinstance(e, ast.IndexExpr):
        return f"{pretty_expr(e.base, 100)}[{pretty_expr(e.index)}]"
    if isinstance(e, ast.Unary):
        return f"{e.op}{pretty_expr(e.operand, 80)}"
    if isinstance(e, ast.Binary):
        prec = _PREC[e.op]
        # Right-associative implication keeps the right side unwrapped.
        lhs = pretty_expr(e.lhs, prec + (0 if e.op == "=>" else 0))
        rhs = pretty_expr(e.rhs, prec if e.op == "=>" else prec + 1)
        text = f"{lhs} {e.op} {rhs}"
        return f"({text})" if prec < parent_prec else text
    if isinstance(e, ast.Fold):
        return f"({e.op} {e.var} : {pretty_type(e.set_type)} @ {pretty_expr(e.body)})"
    if isinstance(e, ast.Call):
        args = "".join(f", {pretty_expr(a)}" for a in e.args)
        return f"call({e.name}{args})"
    if isinstance(e, ast.QueueOp):
        return f"{e.target}.{e.op}()"
    raise TypeError(f"unknown expression node {e!r}")


def pretty_type(t: ast.TypeExpr) -> str:
    if isinstance(t, ast.BoolType):
        return "bool"
    if isinstance(t, ast.TypeName):
        return t.name
    if isinstance(t, ast.RangeType):
        return f"{pretty_expr(t.lo, 60)} .. {pretty_expr(t.hi, 60)}"
    if isinstance(t, ast.EnumType):
        return "{ " + ", ".join(pretty_expr(m) for m in t.members) + " }"
    if isinstance(t, ast.ArrayType):
        return f"array {pretty_type(t.index)} of {pretty_type(t.elem)}"
    if isinstance(t, ast.QueueType):
        return f"queue[{pretty_type(t.elem)}]({pretty_expr(t.capacity)})"
    raise TypeError(f"unknown type node {t!r}")


def pretty_stmt(s: ast.Stmt) -> str:
    if isinstance(s, ast.SkipStmt):
        return "skip"
    if isinstance(s, ast.Assign):
        return f"{pretty_expr(s.target)} := {pretty_expr(s.value)}"
    if isinstance(s, ast.DemonicAssign):
        prefix = "array " if s.choice.array else ""
        return f"{pretty_expr(s.target)} :: {prefix}{pretty_type(s.choice.elem)}"
    if isinstance(s, ast.QueueStmt):
        arg = pretty_expr(s.arg) if s.arg is not None else ""
        return f"{s.target}.{s.op}({arg})"
    if isinstance(s, ast.IfStmt):
        parts = []
        for k, (cond, body) in enumerate(s.branches):
            kw = "if" if k == 0 else "elseif"
            parts.append(f"{kw} {pretty_expr(cond)} then {_stmts(body)}")
        if s.orelse:
            parts.append(f"else {_stmts(s.orelse)}")
        return " ".join(parts) + " fi"
    raise TypeError(f"unknown statement node {s!r}")


def _stmts(stmts) -> str:
    return ", ".join(pretty_stmt(s) for s in stmts)


def _var_decl(v: ast.VarDecl) -> str:
    init = f" := {pretty_expr(v.init)}" if v.init is not None else ""
    return f"{v.name} : {pretty_type(v.type)}{init}"


def pretty_event(e: ast.EventDecl, indent: str = "    ") -> str:
    head = e.name
    if e.indices:
        groups = "; ".join(
            f"{ix.name} : {'fair ' if ix.fair else ''}{pretty_type(ix.type)}"
            for ix in e.indices
        )
        head += f" ({groups})"
    if e.bounds is not None:
        lo, hi = e.bounds
        head += f" [{pretty_expr(lo)}, {pretty_expr(hi) if hi is not None else '*'}]"
    if e.fairness != "spontaneous":
        head += f" {e.fairness}"
    lines = [head]
    if e.sync is not None:
        targets = ", ".join(f"{slot}.{ev}" for slot, ev in e.sync.targets)
        lines.append(f"{indent}sync {targets} as {e.sync.as_name}")
    if e.guard is not None:
        lines.append(f"{indent}when {pretty_expr(e.guard)}")
    if e.start:
        lines.append(f"{indent}start {', '.join(e.start)}")
    if e.stop:
        lines.append(f"{indent}stop {', '.join(e.stop)}")
    if e.action:
        lines.append(f"{indent}do {_stmts(e.action)} end")
    else:
        lines.append(f"{indent}end")
    return "\n".join(lines)


def _block(keyword: str, items: list[str], indent: str = "  ") -> list[str]:
    if not items:
        return []
    lines = [f"{indent}{keyword}"]
    for k, item in enumerate(items):
        sep = " ;" if k + 1 < len(items) else ""
        body = item if "\n" not in item else item
        lines.append(f"{indent}  {body}{sep}" if "\n" not in item else _indent_multi(body, indent + "  ") + sep)
    lines.append(f"{indent}end")
    return lines


def _indent_multi(text: str, indent: str) -> str:
    return "\n".join(indent + line for line in text.split("\n"))


def pretty_module(m: ast.ModuleDecl) -> str:
    params = ", ".join(
        f"{p.mode} {p.name} : {pretty_type(p.type)}" for p in m.params
    )
    lines = [f"module {m.name} ({params})"]
    lines += _block("depends", [f"{d.slot} : {d.module}" for d in m.depends])
    lines += _block("locals", [_var_decl(v) for v in m.locals])
    lines += _block(
        "timers",
        [
            f"{t.name} : 0 .. {pretty_expr(t.bound)}"
            + (f" := {pretty_expr(t.init)}" if t.init is not None else "")
            for t in m.timers
        ],
    )
    for d in m.defines:
        lines.append("  " + _define(d))
    lines += _block("events", [pretty_event(e) for e in m.events])
    lines.append("end")
    return "\n".join(lines)


def _define(d: ast.DefineDecl) -> str:
    params = ", ".join(f"{n} : {pretty_type(t)}" for n, t in d.params)
    return f"define {d.name}({params}) == {pretty_expr(d.body)}"


def _instance(i: ast.InstanceDecl) -> str:
    args = ", ".join(f"{a.mode} {pretty_expr(a.value)}" for a in i.args)
    text = f"{i.name} = {i.module}({args})"
    if i.with_bindings:
        binds = ", ".join(f"{slot} := {inst}" for slot, inst in i.with_bindings)
        text += f" with {binds} end"
    return text


def pretty_comp(c: ast.CompExpr) -> str:
    if isinstance(c, ast.CompName):
        return c.name
    if isinstance(c, ast.CompPar):
        return f"{pretty_comp(c.left)} || {pretty_comp(c.right)}"
    if isinstance(c, ast.CompIter):
        args = ", ".join(f"{a.mode} {pretty_expr(a.value)}" for a in c.args)
        return f"|| {c.var} : {pretty_type(c.set_type)} @ {c.module}({args})"
    raise TypeError(f"unknown composition node {c!r}")


def pretty_model(model: ast.SourceModel) -> str:
    chunks: list[str] = []
    if model.types:
        chunks.append(
            "types\n"
            + " ;\n".join(f"  {t.name} = {pretty_type(t.type)}" for t in model.types)
            + "\nend"
        )
    if model.constants:
        chunks.append(
            "constants\n"
            + " ;\n".join(f"  {c.name} = {pretty_expr(c.value)}" for c in model.constants)
            + "\nend"
        )
    if model.globals:
        chunks.append(
            "globals\n"
            + " ;\n".join(f"  {_var_decl(v)}" for v in model.globals)
            + "\nend"
        )
    for d in model.defines:
        chunks.append(_define(d))
    for m in model.modules:
        chunks.append(pretty_module(m))
    if model.instances:
        chunks.append(
            "instances\n"
            + " ;\n".join(f"  {_instance(i)}" for i in model.instances)
            + "\nend"
        )
    for r in model.renames:
        chunks.append(f"{r.name} ::= " + " || ".join(r.instances))
    if model.system is not None:
        chunks.append(f"system = {pretty_comp(model.system)}")
    if model.properties:
        chunks.append(
            "properties\n"
            + " ;\n".join(f"  {p.name} :\n    {p.source}" for p in model.properties)
            + "\nend"
        )
    return "\n\n".join(chunks) + "\n"
