"""LTL to generalized Büchi automaton via the on-the-fly tableau of
Gerth, Peled, Vardi, and Wolper (PSTV'95).

Input formulas are first pushed to negation normal form over
tt/ff/atom/!atom/and/or/X/U/R (surface [] and <> become R/U).  Automaton
states read the label of the configuration they are entered on; acceptance
is one set per Until subformula (generalized; the emptiness search treats
each set as a separate condition, so no degeneralization is needed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ttmc.diagnostics import Diagnostic, LimitExceeded
from ttmc.checker.atoms import AtomRef
from ttmc.syntax.ltl import (
    Formula, LAlways, LAnd, LBool, LEventually, LImplies, LNot, LOr, LUntil,
)

# NNF terms are nested tuples:
#   ("tt",) ("ff",) ("at", i) ("nat", i)
#   ("and", a, b) ("or", a, b) ("X", a) ("U", a, b) ("R", a, b)

TT = ("tt",)
FF = ("ff",)


def nnf(f: Formula, negate: bool = False):
    if isinstance(f, LBool):
        v = f.value != negate
        return TT if v else FF
    if isinstance(f, AtomRef):
        return ("nat", f.index) if negate else ("at", f.index)
    if isinstance(f, LNot):
        return nnf(f.operand, not negate)
    if isinstance(f, LAnd):
        op = "or" if negate else "and"
        return (op, nnf(f.lhs, negate), nnf(f.rhs, negate))
    if isinstance(f, LOr):
        op = "and" if negate else "or"
        return (op, nnf(f.lhs, negate), nnf(f.rhs, negate))
    if isinstance(f, LImplies):
        return nnf(LOr(LNot(f.lhs), f.rhs), negate)
    if isinstance(f, LAlways):
        # []g = ff R g ; ![]g = tt U !g
        if negate:
            return ("U", TT, nnf(f.operand, True))
        return ("R", FF, nnf(f.operand, False))
    if isinstance(f, LEventually):
        # <>g = tt U g ; !<>g = ff R !g
        if negate:
            return ("R", FF, nnf(f.operand, True))
        return ("U", TT, nnf(f.operand, False))
    if isinstance(f, LUntil):
        op = "R" if negate else "U"
        return (op, nnf(f.lhs, negate), nnf(f.rhs, negate))
    raise TypeError(f"cannot normalize {f!r}")


@dataclass
class Tableau:
    """GBA produced by the tableau: states are expanded nodes."""

    n_states: int
    initial: tuple[int, ...]
    successors: tuple[tuple[int, ...], ...]
    pos_literals: tuple[frozenset, ...]  # atom indices required true
    neg_literals: tuple[frozenset, ...]  # atom indices required false
    acceptance: tuple[frozenset, ...]  # one state set per Until subformula

    def compatible(self, state: int, atom_bits: int) -> bool:
        for i in self.pos_literals[state]:
            if not (atom_bits >> i) & 1:
                return False
        for i in self.neg_literals[state]:
            if (atom_bits >> i) & 1:
                return False
        return True


@dataclass
class _Node:
    incoming: set
    new: set
    old: set
    nxt: set


_INIT = -1


def gpvw(formula, node_limit: int = 100_000) -> Tableau:
    """Expand an NNF formula into a GBA.  Raises FormulaTooLarge past the
    node limit."""
    nodes: list[tuple[frozenset, frozenset, set]] = []  # (old, next, incoming)
    lookup: dict[tuple[frozenset, frozenset], int] = {}

    stack = [_Node(incoming={_INIT}, new={formula}, old=set(), nxt=set())]
    while stack:
        node = stack.pop()
        if not node.new:
            key = (frozenset(node.old), frozenset(node.nxt))
            idx = lookup.get(key)
            if idx is not None:
                nodes[idx][2].update(node.incoming)
                continue
            idx = len(nodes)
            if idx >= node_limit:
                raise LimitExceeded(
                    [Diagnostic("FormulaTooLarge",
                                f"tableau exceeds {node_limit} nodes")]
                )
            nodes.append((key[0], key[1], set(node.incoming)))
            lookup[key] = idx
            stack.append(_Node(incoming={idx}, new=set(node.nxt), old=set(), nxt=set()))
            continue
        eta = node.new.pop()
        kind = eta[0]
        if kind == "tt":
            stack.append(node)
            continue
        if kind == "ff":
            continue  # contradiction: drop
        if kind in ("at", "nat"):
            dual = ("nat" if kind == "at" else "at", eta[1])
            if dual in node.old:
                continue
            node.old.add(eta)
            stack.append(node)
            continue
        if kind == "and":
            node.old.add(eta)
            for sub in (eta[1], eta[2]):
                if sub not in node.old:
                    node.new.add(sub)
            stack.append(node)
            continue
        if kind == "X":
            node.old.add(eta)
            node.nxt.add(eta[1])
            stack.append(node)
            continue
        if kind in ("or", "U", "R"):
            a, b = eta[1], eta[2]
            old2 = set(node.old)
            old2.add(eta)
            if kind == "or":
                new1, nxt1 = {a}, set()
                new2, nxt2 = {b}, set()
            elif kind == "U":
                new1, nxt1 = {a}, {eta}
                new2, nxt2 = {b}, set()
            else:  # R
                new1, nxt1 = {b}, {eta}
                new2, nxt2 = {a, b}, set()
            n1 = _Node(
                incoming=set(node.incoming),
                new=node.new | (new1 - old2),
                old=set(old2),
                nxt=node.nxt | nxt1,
            )
            n2 = _Node(
                incoming=set(node.incoming),
                new=node.new | (new2 - old2),
                old=old2,
                nxt=set(node.nxt) | nxt2,
            )
            stack.append(n1)
            stack.append(n2)
            continue
        raise TypeError(f"unknown NNF term {eta!r}")

    n = len(nodes)
    initial = tuple(i for i, (_, _, inc) in enumerate(nodes) if _INIT in inc)
    successors = tuple(
        tuple(j for j, (_, _, inc) in enumerate(nodes) if i in inc)
        for i in range(n)
    )
    pos = tuple(
        frozenset(t[1] for t in old if t[0] == "at") for old, _, _ in nodes
    )
    neg = tuple(
        frozenset(t[1] for t in old if t[0] == "nat") for old, _, _ in nodes
    )
    untils = sorted(
        {t for old, _, _ in nodes for t in old if t[0] == "U"},
        key=repr,
    )
    acceptance = tuple(
        frozenset(
            i for i, (old, _, _) in enumerate(nodes)
            if u not in old or u[2] in old or u[2] == TT
        )
        for u in untils
    )
    return Tableau(
        n_states=n,
        initial=initial,
        successors=successors,
        pos_literals=pos,
        neg_literals=neg,
        acceptance=acceptance,
    )
