"""LTL model checking under fairness and real-time scheduling."""

from ttmc.checker.expand import expand_quantifiers, invariant_body
from ttmc.checker.atoms import atoms_of
from ttmc.checker.check import Verdict, Lasso, check, check_invariant, verify
from ttmc.checker.obligations import FairnessObligation, fairness_obligations

__all__ = [
    "expand_quantifiers", "invariant_body", "atoms_of",
    "Verdict", "Lasso", "check", "check_invariant", "verify",
    "FairnessObligation", "fairness_obligations",
]
