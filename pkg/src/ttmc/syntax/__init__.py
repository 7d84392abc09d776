"""Lexer, parser, AST, and pretty-printer for the TTM textual notation."""

from ttmc.syntax.parser import parse, parse_model
from ttmc.syntax.pretty import pretty_model

__all__ = ["parse", "parse_model", "pretty_model"]
