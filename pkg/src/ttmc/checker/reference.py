"""Naive reference checker used as an oracle in tests.

Independent second route: instead of the on-the-fly GPVW tableau it builds
the classic declarative closure automaton (all maximal consistent subsets
of the closure of the negated formula, Lichtenstein/Pnueli style), takes
the explicit product with the explored LTS, and decides fair emptiness by
brute force: it enumerates every subset B of the compassion obligations,
deletes the states where an obligation in B is enabled, decomposes into
SCCs, and checks the remaining conditions flat on each component.  This is
exponential in the number of compassion obligations and in the closure
size, which is fine at oracle scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ttmc.checker import atoms as at
from ttmc.checker.expand import expand_quantifiers
from ttmc.checker.obligations import fairness_obligations
from ttmc.checker.product import LtsCache
from ttmc.syntax.ltl import (
    Formula, LAlways, LAnd, LBool, LEventually, LImplies, LNot, LOr, LUntil,
)
from ttmc.checker.atoms import AtomRef


def _closure(f: Formula, acc: list):
    if f not in acc:
        acc.append(f)
        if isinstance(f, (LAnd, LOr, LImplies, LUntil)):
            _closure(f.lhs, acc)
            _closure(f.rhs, acc)
        elif isinstance(f, (LNot, LAlways, LEventually)):
            sub = f.operand
            _closure(sub, acc)
    return acc


def _locally_consistent(A: frozenset, closure: list) -> bool:
    has = A.__contains__
    for f in closure:
        if isinstance(f, LBool):
            if has(f) != f.value:
                return False
        elif isinstance(f, LNot):
            if has(f) == has(f.operand):
                return False
        elif isinstance(f, LAnd):
            if has(f) != (has(f.lhs) and has(f.rhs)):
                return False
        elif isinstance(f, LOr):
            if has(f) != (has(f.lhs) or has(f.rhs)):
                return False
        elif isinstance(f, LImplies):
            if has(f) != ((not has(f.lhs)) or has(f.rhs)):
                return False
        elif isinstance(f, LUntil):
            if has(f.rhs) and not has(f):
                return False
            if has(f) and not has(f.rhs) and not has(f.lhs):
                return False
        elif isinstance(f, LEventually):
            if has(f.operand) and not has(f):
                return False
        elif isinstance(f, LAlways):
            if has(f) and not has(f.operand):
                return False
    return True


def _strict_transition_ok(A: frozenset, B: frozenset, closure: list) -> bool:
    """The exact two-way expansion rules: membership of each temporal
    formula in A is equivalent to its one-step unfolding over (A, B)."""
    for f in closure:
        if isinstance(f, LUntil):
            expect = (f.rhs in A) or (f.lhs in A and f in B)
            if (f in A) != expect:
                return False
        elif isinstance(f, LEventually):
            expect = (f.operand in A) or (f in B)
            if (f in A) != expect:
                return False
        elif isinstance(f, LAlways):
            expect = (f.operand in A) and (f in B)
            if (f in A) != expect:
                return False
    return True


def check_naive(model, formula: Formula, obligations=None,
                limit_states: int = 200_000) -> bool:
    """True iff every legal (fair) execution satisfies the formula."""
    ground = expand_quantifiers(formula, model)
    if isinstance(ground, LBool):
        return ground.value
    if obligations is None:
        obligations = fairness_obligations(model)
    table, refd = at.build_atoms(ground, model)
    neg = LNot(refd)
    closure = _closure(neg, [])
    atoms_in = [f for f in closure if isinstance(f, AtomRef)]

    # All maximal consistent subsets.
    states: list[frozenset] = []
    n = len(closure)
    for bits in itertools.product((False, True), repeat=n):
        A = frozenset(f for f, b in zip(closure, bits) if b)
        if _locally_consistent(A, closure):
            states.append(A)

    trans: dict[int, list[int]] = {}
    for i, A in enumerate(states):
        trans[i] = [
            j for j, B in enumerate(states)
            if _strict_transition_ok(A, B, closure)
        ]
    initial_states = [i for i, A in enumerate(states) if neg in A]
    acc_sets = []
    for f in closure:
        if isinstance(f, LUntil):
            acc_sets.append(
                frozenset(i for i, A in enumerate(states)
                          if f not in A or f.rhs in A)
            )
        elif isinstance(f, LEventually):
            acc_sets.append(
                frozenset(i for i, A in enumerate(states)
                          if f not in A or f.operand in A)
            )
        elif isinstance(f, LAlways):
            # [] held out of a state promises that its body eventually fails.
            acc_sets.append(
                frozenset(i for i, A in enumerate(states)
                          if f in A or f.operand not in A)
            )

    cache = LtsCache(model, table, limit_states)

    def compatible(astate: frozenset, bits: int) -> bool:
        for a in atoms_in:
            if ((bits >> a.index) & 1) != (a in astate):
                return False
        return True

    # Explicit product.
    pnodes: dict[tuple[int, int], int] = {}
    plist: list[tuple[int, int]] = []
    pedges: list[list[int]] = []

    def intern(ci: int, ai: int) -> int:
        key = (ci, ai)
        v = pnodes.get(key)
        if v is None:
            v = len(plist)
            pnodes[key] = v
            plist.append(key)
            pedges.append([])
        return v

    initials = [
        intern(0, ai) for ai in initial_states
        if compatible(states[ai], cache.bits[0])
    ]
    done = 0
    while done < len(plist):
        ci, ai = plist[done]
        out = []
        for _, cj in cache.succs[ci]:
            for aj in trans[ai]:
                if compatible(states[aj], cache.bits[cj]):
                    out.append(intern(cj, aj))
        pedges[done] = sorted(set(out))
        done += 1

    # Reachable set (prefix may be anything).
    reachable = set()
    stack = list(initials)
    while stack:
        v = stack.pop()
        if v in reachable:
            continue
        reachable.add(v)
        stack.extend(pedges[v])

    compassion = [ob for ob in obligations if ob.kind == "compassion"]
    justice = [ob for ob in obligations if ob.kind == "justice"]
    en = {
        id(ob): [ob.enabled_key(k) for k in cache.keys] for ob in obligations
    }
    taken = {
        id(ob): [ob.taken_key(k) for k in cache.keys] for ob in obligations
    }

    for removed in itertools.chain.from_iterable(
        itertools.combinations(range(len(compassion)), r)
        for r in range(len(compassion) + 1)
    ):
        removed_set = set(removed)
        keep = [
            v for v in range(len(plist))
            if not any(
                en[id(compassion[k])][plist[v][0]] for k in removed_set
            )
        ]
        keep_set = set(keep)
        for comp in _sccs(keep, lambda v: (w for w in pedges[v] if w in keep_set)):
            if len(comp) == 1 and comp[0] not in pedges[comp[0]]:
                continue
            if not any(v in reachable for v in comp):
                continue
            ok = True
            for facc in acc_sets:
                if not any(plist[v][1] in facc for v in comp):
                    ok = False
                    break
            if not ok:
                continue
            for ob in justice:
                if not any(
                    taken[id(ob)][plist[v][0]] or not en[id(ob)][plist[v][0]]
                    for v in comp
                ):
                    ok = False
                    break
            if not ok:
                continue
            for k, ob in enumerate(compassion):
                if k in removed_set:
                    continue
                has_en = any(en[id(ob)][plist[v][0]] for v in comp)
                has_taken = any(taken[id(ob)][plist[v][0]] for v in comp)
                if has_en and not has_taken:
                    ok = False
                    break
            if ok:
                return False  # fair accepting cycle exists: formula fails
    return True


def _sccs(nodes: list[int], succ):
    """Iterative Tarjan over an arbitrary successor function."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on = set()
    stack: list[int] = []
    out = []
    counter = [0]
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                p = work[-1][0]
                if low[v] < low[p]:
                    low[p] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out
