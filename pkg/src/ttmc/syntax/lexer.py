"""Tokenizer for .ttm model files and .ltl property files.

Comments run from ``--`` to end of line.  ``[]`` and ``<>`` are lexed as
single tokens (temporal operators); the model grammar never produces the
two-character sequences, so the greedy match is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

from ttmc.diagnostics import Diagnostic, Pos

IDENT = "ident"
INT = "int"
OP = "op"
EOF = "eof"

# Longest match first.
_OPERATORS = [
    "::=", "::", ":=", "==", "!=", "<=", ">=", "&&", "||",
    "=>", "->", "..", "[]", "<>",
    ":", ";", ",", ".", "(", ")", "[", "]", "{", "}",
    "=", "<", ">", "+", "-", "*", "/", "@", "'", "!",
]


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: Pos

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.pos})"


def lex(source: str) -> tuple[list[Token], list[Diagnostic]]:
    """Split source into tokens.  Unknown characters become diagnostics,
    not exceptions, so parsing stays total."""
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("--", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        pos = Pos(line, col)
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token(INT, source[i:j], pos))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(Token(IDENT, source[i:j], pos))
            col += j - i
            i = j
            continue
        for op in _OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token(OP, op, pos))
                col += len(op)
                i += len(op)
                break
        else:
            diagnostics.append(
                Diagnostic("SyntaxError", f"unexpected character {ch!r}", pos)
            )
            i += 1
            col += 1
    tokens.append(Token(EOF, "", Pos(line, col)))
    return tokens, diagnostics
