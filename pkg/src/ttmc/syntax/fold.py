"""Constant folding over expression trees."""

from __future__ import annotations

from ttmc.syntax import ast


def fold_expr(e: ast.Expr) -> ast.Expr:
    """Constant folding over literal subtrees."""
    if isinstance(e, ast.Unary):
        o = fold_expr(e.operand)
        if e.op == "!" and isinstance(o, ast.BoolLit):
            return ast.BoolLit(not o.value, pos=e.pos)
        if e.op == "-" and isinstance(o, ast.IntLit):
            return ast.IntLit(-o.value, pos=e.pos)
        return ast.Unary(e.op, o, pos=e.pos)
    if isinstance(e, ast.Binary):
        a, b = fold_expr(e.lhs), fold_expr(e.rhs)
        if isinstance(a, ast.IntLit) and isinstance(b, ast.IntLit):
            x, y = a.value, b.value
            table = {
                "+": lambda: ast.IntLit(x + y),
                "-": lambda: ast.IntLit(x - y),
                "*": lambda: ast.IntLit(x * y),
                "/": lambda: ast.IntLit(x // y) if y else None,
                "mod": lambda: ast.IntLit(x % y) if y else None,
                "==": lambda: ast.BoolLit(x == y),
                "!=": lambda: ast.BoolLit(x != y),
                "<": lambda: ast.BoolLit(x < y),
                "<=": lambda: ast.BoolLit(x <= y),
                ">": lambda: ast.BoolLit(x > y),
                ">=": lambda: ast.BoolLit(x >= y),
            }
            if e.op in table:
                r = table[e.op]()
                if r is not None:
                    return r
        if isinstance(a, ast.Name) and isinstance(b, ast.Name):
            # Symbol-to-symbol comparison folds by identity.
            if e.op == "==":
                if a.name == b.name:
                    return ast.BoolLit(True, pos=e.pos)
            if e.op == "!=":
                if a.name == b.name:
                    return ast.BoolLit(False, pos=e.pos)
        if isinstance(a, ast.BoolLit) or isinstance(b, ast.BoolLit):
            if e.op == "&&":
                if isinstance(a, ast.BoolLit):
                    return b if a.value else ast.BoolLit(False, pos=e.pos)
                if isinstance(b, ast.BoolLit):
                    return a if b.value else ast.BoolLit(False, pos=e.pos)
            if e.op == "||":
                if isinstance(a, ast.BoolLit):
                    return ast.BoolLit(True, pos=e.pos) if a.value else b
                if isinstance(b, ast.BoolLit):
                    return ast.BoolLit(True, pos=e.pos) if b.value else a
            if e.op == "=>":
                if isinstance(a, ast.BoolLit):
                    return b if a.value else ast.BoolLit(True, pos=e.pos)
                if isinstance(b, ast.BoolLit) and b.value:
                    return ast.BoolLit(True, pos=e.pos)
        return ast.Binary(e.op, a, b, pos=e.pos)
    if isinstance(e, ast.IndexExpr):
        return ast.IndexExpr(fold_expr(e.base), fold_expr(e.index), pos=e.pos)
    if isinstance(e, ast.Fold):
        return ast.Fold(e.op, e.var, e.set_type, fold_expr(e.body), pos=e.pos)
    return e


