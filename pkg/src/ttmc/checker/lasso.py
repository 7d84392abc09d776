"""Lasso counterexamples: direct LTL evaluation and machine validation.

A lasso (finite prefix + repeatable cycle) denotes the infinite execution
prefix . cycle^omega.  ``eval_on_lasso`` decides any ground formula on it
by fixpoint iteration over the cycle, independent of the tableau pipeline,
which makes it a second route for checking every counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass

from ttmc.checker.atoms import AtomRef, AtomTable
from ttmc.lts import semantics as sem
from ttmc.syntax.ltl import (
    Formula, LAlways, LAnd, LBool, LEventually, LImplies, LNot, LOr, LUntil,
)


@dataclass
class Lasso:
    """init --prefix--> pivot --cycle--> pivot (cycle closes on the pivot)."""

    init: sem.Configuration
    prefix: list[tuple[sem.TransitionName, sem.Configuration]]
    cycle: list[tuple[sem.TransitionName, sem.Configuration]]

    @property
    def pivot(self) -> sem.Configuration:
        return self.prefix[-1][1] if self.prefix else self.init

    def configurations(self) -> list[sem.Configuration]:
        return [self.init] + [c for _, c in self.prefix] + [c for _, c in self.cycle]


def eval_on_lasso(f: Formula, table: AtomTable, lasso: Lasso) -> bool:
    """Truth of f at position 0 of prefix . cycle^omega."""
    configs = [lasso.init] + [c for _, c in lasso.prefix]
    cycle_start = len(configs) - 1
    configs.extend(c for _, c in lasso.cycle)
    n = len(configs)
    if lasso.cycle:
        # The last cycle configuration equals the pivot; drop the duplicate
        # and wrap instead.
        assert configs[-1].key() == configs[cycle_start].key()
        configs = configs[:-1]
        n = len(configs)

        def nxt(i: int) -> int:
            return i + 1 if i + 1 < n else cycle_start
    else:
        def nxt(i: int) -> int:
            return min(i + 1, n - 1)

    memo: dict[int, list[bool]] = {}

    def values(g: Formula) -> list[bool]:
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, LBool):
            vals = [g.value] * n
        elif isinstance(g, AtomRef):
            fn = table.atoms[g.index].fn
            vals = [bool(fn(c.key())) for c in configs]
        elif isinstance(g, LNot):
            vals = [not v for v in values(g.operand)]
        elif isinstance(g, LAnd):
            a, b = values(g.lhs), values(g.rhs)
            vals = [x and y for x, y in zip(a, b)]
        elif isinstance(g, LOr):
            a, b = values(g.lhs), values(g.rhs)
            vals = [x or y for x, y in zip(a, b)]
        elif isinstance(g, LImplies):
            a, b = values(g.lhs), values(g.rhs)
            vals = [(not x) or y for x, y in zip(a, b)]
        elif isinstance(g, LUntil):
            a, b = values(g.lhs), values(g.rhs)
            vals = [v for v in b]  # least fixpoint from g-positions
            for _ in range(n + 1):
                changed = False
                for i in range(n - 1, -1, -1):
                    v = b[i] or (a[i] and vals[nxt(i)])
                    if v != vals[i]:
                        vals[i] = v
                        changed = True
                if not changed:
                    break
        elif isinstance(g, LEventually):
            b = values(g.operand)
            vals = [v for v in b]
            for _ in range(n + 1):
                changed = False
                for i in range(n - 1, -1, -1):
                    v = b[i] or vals[nxt(i)]
                    if v != vals[i]:
                        vals[i] = v
                        changed = True
                if not changed:
                    break
        elif isinstance(g, LAlways):
            b = values(g.operand)
            vals = [v for v in b]  # greatest fixpoint
            for _ in range(n + 1):
                changed = False
                for i in range(n - 1, -1, -1):
                    v = b[i] and vals[nxt(i)]
                    if v != vals[i]:
                        vals[i] = v
                        changed = True
                if not changed:
                    break
        else:
            raise TypeError(f"cannot evaluate {g!r} on a lasso")
        memo[key] = vals
        return vals

    return values(f)[0]


def replay_lasso(model, lasso: Lasso) -> list[str]:
    """Re-run every lasso step through the step relation; returns a list of
    problems (empty when the lasso is a legal execution fragment)."""
    problems: list[str] = []
    cur = lasso.init
    init = sem.initial_configuration(model)
    if cur.key() != init.key():
        problems.append("lasso does not start at the initial configuration")
    for k, (tname, target) in enumerate(list(lasso.prefix) + list(lasso.cycle)):
        names = {n.render(model) for n in sem.enabled(model, cur)}
        if tname.render(model) not in names:
            problems.append(f"step {k}: {tname.render(model)} is not enabled")
            return problems
        res = sem.step(model, cur, tname)
        matches = [c for _, c in res.successors if c.key() == target.key()]
        if not matches:
            problems.append(
                f"step {k}: no successor of {tname.render(model)} matches the "
                "recorded configuration"
            )
            return problems
        cur = target
    if lasso.cycle and cur.key() != lasso.pivot.key():
        problems.append("cycle does not close on its starting configuration")
    return problems


def check_cycle_fairness(obligations, lasso: Lasso) -> list[str]:
    """Fairness of the cycle: justice needs a not-enabled state or a taken
    state on the cycle; compassion needs a taken state whenever an enabled
    state occurs on the cycle."""
    problems = []
    cycle_configs = [c for _, c in lasso.cycle]
    if not cycle_configs:
        return ["lasso has an empty cycle"]
    for ob in obligations:
        enabled_somewhere = any(ob.enabled(c) for c in cycle_configs)
        taken_somewhere = any(ob.taken(c) for c in cycle_configs)
        if ob.kind == "justice":
            disabled_somewhere = any(not ob.enabled(c) for c in cycle_configs)
            if not (disabled_somewhere or taken_somewhere):
                problems.append(f"cycle starves just obligation {ob.describe()}")
        else:
            if enabled_somewhere and not taken_somewhere:
                problems.append(f"cycle starves compassionate obligation {ob.describe()}")
    return problems


def validate_lasso(model, formula: Formula, table: AtomTable, obligations,
                   lasso: Lasso) -> list[str]:
    """Full counterexample soundness check: legal replay, fair cycle, and
    the formula is indeed violated on the lasso (direct evaluation)."""
    problems = replay_lasso(model, lasso)
    problems += check_cycle_fairness(obligations, lasso)
    if lasso.cycle and not problems:
        if eval_on_lasso(formula, table, lasso):
            problems.append("formula holds on the returned lasso")
    return problems
