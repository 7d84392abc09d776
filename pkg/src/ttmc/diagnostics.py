"""Source positions, diagnostics, and the error hierarchy shared by all stages."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Pos:
    """1-based line/column position inside a source text."""

    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NO_POS = Pos(0, 0)


@dataclass(frozen=True)
class Diagnostic:
    """One reported problem: a stable code, a message, and where it happened.

    Codes are CamelCase tags such as ``SyntaxError``, ``DuplicateName``,
    ``CircularDataFlow``; tests match on them, messages are for humans.
    """

    code: str
    message: str
    pos: Pos = NO_POS

    def render(self) -> str:
        where = f"{self.pos}: " if self.pos != NO_POS else ""
        return f"{where}{self.code}: {self.message}"


class TtmError(Exception):
    """Base class for all model-level failures.

    Carries one or more diagnostics so callers can render positions without
    string-parsing the exception text.
    """

    def __init__(self, diagnostics: list[Diagnostic] | Diagnostic):
        if isinstance(diagnostics, Diagnostic):
            diagnostics = [diagnostics]
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.render() for d in diagnostics))

    @property
    def code(self) -> str:
        return self.diagnostics[0].code


class ParseError(TtmError):
    """Raised by the convenience wrappers when a source file does not parse."""


class ElaborationError(TtmError):
    """Instantiation, composition, or synchronization failure."""


class SemanticsError(TtmError):
    """Runtime model error: bad transition, failed evaluation, deadlock."""

    def __init__(self, diagnostics, configuration=None):
        super().__init__(diagnostics)
        self.configuration = configuration


class LimitExceeded(TtmError):
    """A configured resource limit was hit; partial statistics attached."""

    def __init__(self, diagnostics, stats: dict | None = None):
        super().__init__(diagnostics)
        self.stats = stats or {}


def err(code: str, message: str, pos: Pos = NO_POS) -> Diagnostic:
    return Diagnostic(code, message, pos)
