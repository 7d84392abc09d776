"""Top-level verification entry points.

``check`` runs the full tableau/product/fair-SCC pipeline; every failing
verdict's lasso is machine-validated (legal replay, fair cycle, formula
violated by direct evaluation) before it is returned.  ``check_invariant``
is the reachability fast path for [] over a state predicate, and ``verify``
routes between the two.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ttmc.checker import atoms as at
from ttmc.checker.buchi import gpvw, nnf
from ttmc.checker.expand import expand_quantifiers, invariant_body
from ttmc.checker.lasso import Lasso, validate_lasso
from ttmc.checker.obligations import fairness_obligations
from ttmc.checker.product import (
    LtsCache, build_product, extract_lasso, find_fair_accepting_scc,
)
from ttmc.diagnostics import Diagnostic, SemanticsError
from ttmc.elaborate import model as fm
from ttmc.lts import semantics as sem
from ttmc.lts.explore import DEFAULT_STATE_LIMIT
from ttmc.syntax.ltl import Formula, LBool, LNot


@dataclass
class Verdict:
    holds: bool
    counterexample: Lasso | None = None
    statistics: dict = field(default_factory=dict)


def check(
    model: fm.FlatModel,
    formula: Formula,
    obligations=None,
    limit_states: int = DEFAULT_STATE_LIMIT,
    limit_product: int | None = None,
    tableau_limit: int = 100_000,
    validate: bool = True,
) -> Verdict:
    """Does every legal (fair) execution satisfy the formula?"""
    t0 = time.monotonic()
    ground = expand_quantifiers(formula, model)
    if obligations is None:
        obligations = fairness_obligations(model)
    if isinstance(ground, LBool):
        return Verdict(holds=ground.value, statistics={"time": 0.0})
    table, refd = at.build_atoms(ground, model)
    negated = nnf(LNot(refd))
    tableau = gpvw(negated, node_limit=tableau_limit)

    cache = LtsCache(model, table, limit_states)
    product = build_product(
        cache, tableau, limit_product or max(4 * limit_states, 1_000_000)
    )
    scc = find_fair_accepting_scc(product, cache, tableau, obligations)
    stats = {
        "states": cache.n_states,
        "transitions": cache.n_transitions,
        "product_states": product.n_nodes,
        "tableau_states": tableau.n_states,
        "time": round(time.monotonic() - t0, 6),
    }
    if scc is None:
        return Verdict(holds=True, statistics=stats)
    lasso = extract_lasso(product, cache, tableau, obligations, scc)
    if validate:
        problems = validate_lasso(model, refd, table, obligations, lasso)
        if problems:
            raise SemanticsError(
                [Diagnostic("InternalError",
                            "unsound counterexample: " + "; ".join(problems))]
            )
    stats["time"] = round(time.monotonic() - t0, 6)
    return Verdict(holds=False, counterexample=lasso, statistics=stats)


def check_invariant(
    model: fm.FlatModel,
    predicate: Formula,
    limit_states: int = DEFAULT_STATE_LIMIT,
) -> Verdict:
    """[] predicate by reachability; the counterexample is a finite path
    (a lasso with an empty cycle)."""
    from ttmc.lts.engine import engine_for, succ_all
    from collections import deque

    t0 = time.monotonic()
    ground = expand_quantifiers(predicate, model)
    if isinstance(ground, LBool) and ground.value:
        return Verdict(holds=True, statistics={"time": 0.0})
    table, refd = at.build_atoms(ground, model) if not isinstance(ground, LBool) \
        else (at.AtomTable(model), ground)
    eng = engine_for(model)
    init_key = sem.initial_configuration(model).key()
    keys = [init_key]
    index = {init_key: 0}
    parents: list[tuple[int, object] | None] = [None]
    frontier = deque([0])
    violating = None
    if not at.eval_state_formula(refd, table, init_key):
        violating = 0
    n_transitions = 0
    evaluate = at.eval_state_formula
    while frontier and violating is None:
        node = frontier.popleft()
        succ = succ_all(eng, keys[node])
        if not succ:
            raise SemanticsError(
                [Diagnostic("Deadlock",
                            "a configuration enables no transition at all")],
                configuration=sem.Configuration(*keys[node]),
            )
        for raw, key in succ:
            n_transitions += 1
            tgt = index.get(key)
            if tgt is None:
                tgt = len(keys)
                if tgt >= limit_states:
                    from ttmc.diagnostics import LimitExceeded

                    raise LimitExceeded(
                        [Diagnostic("StateLimitExceeded",
                                    f"more than {limit_states} configurations")],
                        stats={"states": len(keys)},
                    )
                index[key] = tgt
                keys.append(key)
                parents.append((node, raw))
                if not evaluate(refd, table, key):
                    violating = tgt
                    break
                frontier.append(tgt)
    stats = {
        "states": len(keys),
        "transitions": n_transitions,
        "time": round(time.monotonic() - t0, 6),
    }
    if violating is None:
        return Verdict(holds=True, statistics=stats)
    steps = []
    node = violating
    while parents[node] is not None:
        parent, raw = parents[node]
        steps.append((sem.transition_name(model, raw), sem.Configuration(*keys[node])))
        node = parent
    steps.reverse()
    lasso = Lasso(init=sem.Configuration(*init_key), prefix=steps, cycle=[])
    return Verdict(holds=False, counterexample=lasso, statistics=stats)


def verify(model: fm.FlatModel, formula: Formula, **kw) -> Verdict:
    """Route [] state-predicates to the reachability path, everything else
    to the full Büchi pipeline."""
    ground = expand_quantifiers(formula, model)
    body = invariant_body(ground)
    if body is not None:
        kw2 = {k: v for k, v in kw.items() if k == "limit_states"}
        return check_invariant(model, body, **kw2)
    return check(model, ground, **kw)
