"""Acceptance suite: one test per criterion, each printing a PASS line with
its runtime (run with ``pytest tests/test_acceptance.py -v -s``).

Every criterion pins its tolerance/time budget here; nothing is deferred
to later calibration.
"""

from __future__ import annotations

import time

import pytest

from tests.conftest import flat_model, property_formula
from ttmc.checker import (
    check, check_invariant, fairness_obligations, verify,
)
from ttmc.checker.atoms import build_atoms
from ttmc.checker.expand import expand_quantifiers, invariant_body
from ttmc.checker.lasso import validate_lasso
from ttmc.checker.reference import check_naive
from ttmc.syntax.ltl import parse_ltl


def report(criterion: str, started: float, budget: float | None = None):
    elapsed = time.monotonic() - started
    if budget is not None:
        assert elapsed < budget, f"{criterion}: {elapsed:.1f}s over {budget}s budget"
    limit = f" (< {budget:.0f}s)" if budget else ""
    print(f"\nACCEPTANCE PASS: {criterion} [{elapsed:.2f}s{limit}]")


def assert_sound_counterexample(model, formula, verdict):
    """Machine validation of a failing verdict: legal replay, fair cycle,
    formula violated on the lasso."""
    assert not verdict.holds and verdict.counterexample is not None
    ground = expand_quantifiers(formula, model)
    table, refd = build_atoms(ground, model)
    problems = validate_lasso(
        model, refd, table, fairness_obligations(model), verdict.counterexample
    )
    assert problems == [], problems


def test_criterion_1_clock_table_conformance():
    """step's clock updates match direct transliterations of both function
    tables on 500 randomized micro-models; 100% agreement; < 10 s."""
    from tests.helpers import flatten_micro
    from tests.test_clock_oracle import check_model

    started = time.monotonic()
    verified = 0
    for seed in range(500):
        if check_model(flatten_micro(seed)):
            verified += 1
    assert verified >= 400  # almost every random model explores fully
    report(f"clock-table conformance on 500 micro-models ({verified} explored)",
           started, budget=10.0)


def test_criterion_2_train_abstract():
    """Abstract train (2 trains, 2 platforms): safety and per-train liveness
    hold; the demonic-index variant fails liveness with a machine-validated
    fair lasso; each check < 60 s."""
    m = flat_model("train_abstract")

    started = time.monotonic()
    assert verify(m, property_formula(m, "safety")).holds
    report("train abstract: safety holds", started, budget=60.0)

    started = time.monotonic()
    assert check(m, property_formula(m, "liveness")).holds
    # and for each train instantiation separately
    for train in ("T1", "T2"):
        f = parse_ltl(
            f"[](loc[{train}] == Entr => <>(loc[{train}] == Out))", m
        )
        assert check(m, f).holds, train
    report("train abstract: liveness holds for every train", started, budget=60.0)

    started = time.monotonic()
    md = flat_model("train_abstract_demonic")
    f = property_formula(md, "liveness")
    verdict = check(md, f)
    assert_sound_counterexample(md, f, verdict)
    report("train abstract, demonic index: liveness fails with a fair lasso",
           started, budget=60.0)


def test_criterion_3_train_refined():
    """Refined train (FIFO queue, just): safety and liveness hold; < 60 s."""
    m = flat_model("train_refined")
    started = time.monotonic()
    assert verify(m, property_formula(m, "safety")).holds
    assert check(m, property_formula(m, "liveness")).holds
    report("train refined: safety and liveness hold", started, budget=60.0)


def test_criterion_4_nop_synchronized():
    """Synchronized NOP (2 sensors, 19-interval signal abstraction): the
    consistency and instantaneous-response invariants hold; < 120 s."""
    m = flat_model("nop_sync")
    started = time.monotonic()
    v3 = verify(m, property_formula(m, "controller_consistent"))
    assert v3.holds
    v4 = verify(m, property_formula(m, "instantaneous_response"))
    assert v4.holds
    report("NOP synchronized: consistency and instantaneous response hold",
           started, budget=120.0)


def test_criterion_5_nop_refined():
    """Refined NOP (generate [2,*], respond [1,1]): instantaneous response
    fails with a counterexample, consistency holds, and the 2-tick timed
    response holds; < 120 s."""
    m = flat_model("nop_refined")
    started = time.monotonic()
    v4 = verify(m, property_formula(m, "instantaneous_response"))
    assert not v4.holds and v4.counterexample is not None
    assert v4.counterexample.prefix, "expected a finite violating path"
    assert verify(m, property_formula(m, "controller_consistent")).holds
    v5 = check(m, property_formula(m, "timed_response"))
    assert v5.holds
    report("NOP refined: response lag exposed, consistency and 2-tick "
           "timed response hold", started, budget=120.0)


def test_criterion_6_error_reporting():
    """Circular primed flow, double writes, and cyclic depends are rejected
    with their documented codes and source positions."""
    from ttmc import models
    from ttmc.diagnostics import ElaborationError
    from ttmc.elaborate.flatten import flatten_source

    started = time.monotonic()
    expectations = [
        ("errors/circular_flow", "CircularDataFlow"),
        ("errors/double_write", "DoubleAssignment"),
        ("errors/cyclic_depends", "CyclicModuleDependency"),
    ]
    for name, code in expectations:
        with pytest.raises(ElaborationError) as err:
            flatten_source(models.source(name))
        diags = err.value.diagnostics
        assert any(d.code == code for d in diags), (name, diags)
        source = models.source(name)
        lines = source.splitlines()
        for d in diags:
            assert d.pos.line >= 1 and d.pos.line <= len(lines), (name, d)
            assert d.pos.col >= 1
    report("error reporting with source positions", started)


def test_criterion_7_oracle_equivalence():
    """The production checker agrees with the naive reference checker on the
    whole formula suite (all four scheduling regimes); 100% agreement."""
    from tests.test_reference_oracle import FORMULAS, MODELS
    from ttmc.elaborate.flatten import flatten_source

    started = time.monotonic()
    runs = 0
    for name, src in MODELS.items():
        m = flatten_source(src)
        for formula in FORMULAS[name]:
            f = parse_ltl(formula, m)
            assert check(m, f).holds == check_naive(m, f), (name, formula)
            runs += 1
    assert runs >= 20
    report(f"checker/naive-reference agreement on {runs} runs", started)


def test_criterion_8_counterexample_soundness():
    """Every failing verdict in the acceptance set replays through step and
    satisfies all fairness obligations on its cycle."""
    started = time.monotonic()
    cases = []
    md = flat_model("train_abstract_demonic")
    cases.append((md, property_formula(md, "liveness")))
    ph = flat_model("philosophers")
    cases.append((ph, property_formula(ph, "progress")))
    for m, f in cases:
        verdict = check(m, f)
        assert_sound_counterexample(m, f, verdict)
    report(f"counterexample soundness on {len(cases)} failing verdicts", started)


def test_criterion_9_real_time_bound_sweep():
    """1-event models for all 0 <= l <= u <= 3 take the event within u ticks
    of continuous enabledness; the spontaneous unbounded variant violates
    the u+1 bound."""
    from tests.test_checker import sweep_model
    from ttmc.elaborate.flatten import flatten_source

    started = time.monotonic()
    for l in range(4):
        for u in range(l, 4):
            m = flatten_source(sweep_model(l, u))
            assert verify(m, parse_ltl(f"[](tm <= {u})", m)).holds, (l, u)
    for u in range(4):
        m = flatten_source(sweep_model(0, None))
        verdict = check(m, parse_ltl(f"[](tm <= {u + 1})", m))
        assert not verdict.holds
        assert verdict.counterexample.cycle
    report("real-time bound sweep over all 0 <= l <= u <= 3", started)
