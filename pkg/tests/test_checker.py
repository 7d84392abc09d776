"""Checker behaviour: atoms, fairness regimes, the real-time bound sweep,
invariant/Büchi agreement, counterexample soundness."""

from __future__ import annotations

import pytest

from tests.conftest import property_formula
from ttmc.checker import (
    atoms_of, check, check_invariant, fairness_obligations, verify,
)
from ttmc.checker.atoms import build_atoms
from ttmc.checker.expand import expand_quantifiers
from ttmc.checker.lasso import eval_on_lasso, validate_lasso
from ttmc.elaborate.flatten import flatten_source
from ttmc.lts import enabled, initial_configuration, step
from ttmc.syntax.ltl import parse_ltl


class TestAtomsOf:
    def test_event_atom_after_occurrence(self, train_abstract):
        m = train_abstract
        f = parse_ltl("<> move_out(T1) || <> move_out(T2)", m)
        cfg = initial_configuration(m)
        valuation = atoms_of(m, cfg, expand_quantifiers(f, m))
        assert set(valuation.values()) == {False}  # p is bottom initially

        # Drive T1 onto a platform and out of it.
        def take(cfg, label):
            names = {n.render(m): n for n in enabled(m, cfg)}
            return step(m, cfg, names[label]).successors[0][1]

        for label in ["arrive(T1)#", "arrive(T1)", "ctrl_entry_signal#",
                      "ctrl_entry_signal", "move_in(T1)#"]:
            cfg = take(cfg, label)
        names = [n for n in enabled(m, cfg) if n.kind == "event"]
        cfg = step(m, cfg, names[0]).successors[0][1]
        for label in ["ctrl_platform_signal(P1)#", "ctrl_platform_signal(P1)",
                      "move_out(T1)#", "move_out(T1)"]:
            cfg = take(cfg, label)
        valuation = atoms_of(m, cfg, expand_quantifiers(f, m))
        assert valuation["taken:move_out:(%d,)" % m.symbol_ids["T1"] + ":()"] is True
        assert valuation["taken:move_out:(%d,)" % m.symbol_ids["T2"] + ":()"] is False

    def test_mono_false_between_hash_and_event(self):
        m = flatten_source("""
module M ()
  timers tm : 0 .. 3 end
  events e when true start tm do skip end end
end
""")
        f = parse_ltl("[] mono(tm)", m)
        cfg = initial_configuration(m)
        valuation = atoms_of(m, cfg, f)
        assert valuation["mono(tm)"] is True
        names = {n.render(m): n for n in enabled(m, cfg)}
        cfg = step(m, cfg, names["e#"]).successors[0][1]
        assert atoms_of(m, cfg, f)["mono(tm)"] is False
        (ev,) = enabled(m, cfg)
        cfg = step(m, cfg, ev).successors[0][1]
        assert atoms_of(m, cfg, f)["mono(tm)"] is True


def sweep_model(l: int, u, fairness: str = "") -> str:
    bound = f"[{l}, {'*' if u is None else u}]"
    tm_bound = 6
    return f"""
module M ()
  timers tm : 0 .. {tm_bound} end
  events
    e {bound} {fairness}
      when true
      start tm
      do skip end
  end
end
"""


class TestRealTimeSweep:
    @pytest.mark.parametrize("l,u", [(l, u) for l in range(4) for u in range(l, 4)])
    def test_event_occurs_within_u_ticks(self, l, u):
        m = flatten_source(sweep_model(l, u))
        f = parse_ltl(f"[](tm <= {u})", m)
        assert verify(m, f).holds, f"[{l},{u}] should fire within {u} ticks"
        # and the full Büchi path agrees
        assert check(m, f).holds

    @pytest.mark.parametrize("u", range(4))
    def test_spontaneous_unbounded_violates_bound(self, u):
        m = flatten_source(sweep_model(0, None))
        f = parse_ltl(f"[](tm <= {u + 1})", m)
        verdict = check(m, f)
        assert not verdict.holds
        assert verdict.counterexample.cycle, "needs a lasso witness"


class TestFairnessRegimes:
    def test_obligations_derived(self, train_abstract):
        obs = fairness_obligations(train_abstract)
        kinds = {(o.event, o.kind) for o in obs}
        assert ("move_out", "justice") in kinds
        assert ("ctrl_platform_signal", "compassion") in kinds
        # one obligation per fair valuation
        assert len([o for o in obs if o.event == "move_out"]) == 2
        assert len([o for o in obs if o.event == "ctrl_platform_signal"]) == 5

    def test_spontaneous_has_no_obligation(self):
        m = flatten_source("""
module M ()
  locals a : 0 .. 1 := 0 end
  events e when true do a := 1 end end
end
""")
        assert fairness_obligations(m) == []

    def test_real_time_event_treated_as_just(self):
        m = flatten_source("""
module M ()
  locals a : 0 .. 1 := 0 end
  events e [0, 2] when true do a := 1 end end
end
""")
        (ob,) = fairness_obligations(m)
        assert ob.kind == "justice"

    def test_fairness_monotonicity(self, philosophers):
        # A formula holding with no obligations keeps holding with them:
        # obligations only shrink the execution set.
        f = property_formula(philosophers, "mutex")
        assert check(philosophers, f, obligations=[]).holds
        assert check(philosophers, f).holds

    def test_justice_changes_verdict(self):
        src = """
module M ()
  locals a : 0 .. 1 := 0 end
  events e {fair} when a == 0 do a := 1 end end
end
"""
        spontaneous = flatten_source(src.format(fair=""))
        just = flatten_source(src.format(fair="just"))
        f_src = "<>(a == 1)"
        assert not check(spontaneous, parse_ltl(f_src, spontaneous)).holds
        assert check(just, parse_ltl(f_src, just)).holds

    def test_compassion_vs_justice(self):
        # The guard blinks: justice is satisfied by any run (the guard is
        # not continuously true), compassion still forces the event.
        src = """
module M ()
  locals a : 0 .. 1 := 0 ; done : bool := false end
  events
    blink just when true do a := 1 - a end ;
    grab {fair} when a == 1 && !done do done := true end
  end
end
"""
        just = flatten_source(src.format(fair="just"))
        compassionate = flatten_source(src.format(fair="compassionate"))
        f_src = "<> done"
        assert not check(just, parse_ltl(f_src, just)).holds
        assert check(compassionate, parse_ltl(f_src, compassionate)).holds


class TestInvariantAgreement:
    @pytest.mark.parametrize("model_name,prop", [
        ("train_abstract", "safety"),
        ("train_refined", "safety"),
        ("philosophers", "mutex"),
        ("nop_refined", "controller_consistent"),
        ("nop_refined", "instantaneous_response"),
    ])
    def test_check_always_equals_check_invariant(self, model_name, prop):
        from tests.conftest import flat_model
        from ttmc.checker.expand import invariant_body

        m = flat_model(model_name)
        f = property_formula(m, prop)
        ground = expand_quantifiers(f, m)
        body = invariant_body(ground)
        assert body is not None
        via_reach = check_invariant(m, body)
        via_buchi = check(m, ground)
        assert via_reach.holds == via_buchi.holds

    def test_box_false_fails_at_initial(self):
        m = flatten_source("""
module M ()
  locals a : 0 .. 1 := 0 end
  events e when true do a := 1 end end
end
""")
        f = parse_ltl("[] false", m)
        v = verify(m, f)
        assert not v.holds
        assert v.counterexample.prefix == []  # violated at the start


class TestCounterexampleSoundness:
    def failing_verdicts(self):
        out = []
        from tests.conftest import flat_model

        m = flat_model("train_abstract_demonic")
        out.append((m, property_formula(m, "liveness")))
        m2 = flat_model("philosophers")
        out.append((m2, property_formula(m2, "progress")))
        m3 = flatten_source(sweep_model(0, None))
        out.append((m3, parse_ltl("[](tm <= 1)", m3)))
        return out

    def test_every_failing_lasso_replays_and_is_fair(self):
        for m, f in self.failing_verdicts():
            verdict = check(m, f)
            assert not verdict.holds
            ground = expand_quantifiers(f, m)
            table, refd = build_atoms(ground, m)
            problems = validate_lasso(
                m, refd, table, fairness_obligations(m), verdict.counterexample
            )
            assert problems == [], problems

    def test_direct_evaluation_rejects_formula_on_lasso(self):
        m, f = self.failing_verdicts()[0]
        verdict = check(m, f)
        ground = expand_quantifiers(f, m)
        table, refd = build_atoms(ground, m)
        assert eval_on_lasso(refd, table, verdict.counterexample) is False


class TestCompassionRefinement:
    """A compassion obligation enabled somewhere in the maximal SCC but
    never taken in the product forces the refinement step: the fair
    counterexample cycle lives in the sub-component left after removing
    the enabled states."""

    SRC = """
module M ()
  locals r : 0 .. 1 := 0 ; f : bool := false end
  events
    c_ev compassionate when r == 0 do f := true end ;
    leave just when r == 0 do r := 1 end ;
    back when r == 1 do r := 0 end
  end
end
"""

    def test_refined_sub_cycle_found(self):
        from ttmc.checker.reference import check_naive
        from ttmc.elaborate.flatten import flatten_source

        m = flatten_source(self.SRC)
        f = parse_ltl("<> c_ev()", m)
        verdict = check(m, f)
        assert not verdict.holds
        assert check_naive(m, f) is False
        # The fair cycle must avoid every configuration enabling c_ev,
        # i.e. stay in the r == 1 region.
        r_index = m.var_index["r"]
        for _, cfg in verdict.counterexample.cycle:
            assert cfg.s[r_index] == 1


class TestObservationGranularity:
    """Formulas are evaluated over every configuration, including the e#
    bookkeeping configurations.  This is observable: an event that starts a
    timer clears its monotonicity at the e# step, so an Until whose left
    side is mono(...) can fail across that intermediate configuration even
    though every event-level observation satisfies it."""

    SRC = """
module M ()
  timers tm : 0 .. 3 end
  locals n : 0 .. 1 := 0 end
  events e just when n == 0 start tm do n := 1 end end
end
"""

    def test_mono_until_sees_the_hash_blip(self):
        from ttmc.elaborate.flatten import flatten_source

        m = flatten_source(self.SRC)
        # Every path to n == 1 passes through e#, where mono(tm) is false
        # while n is still 0, so the Until is violated there.
        blip_sensitive = parse_ltl("mono(tm) U (n == 1)", m)
        assert not check(m, blip_sensitive).holds
        # Allowing the blip explicitly makes it hold (e is just).
        tolerant = parse_ltl("(mono(tm) || n == 0) U (n == 1)", m)
        assert check(m, tolerant).holds

    def test_event_atoms_false_at_hash_configurations(self):
        from ttmc.elaborate.flatten import flatten_source
        from ttmc.lts import enabled, initial_configuration, step

        m = flatten_source(self.SRC)
        f = parse_ltl("<> e()", m)
        cfg = initial_configuration(m)
        names = {t.render(m): t for t in enabled(m, cfg)}
        cfg = step(m, cfg, names["e#"]).successors[0][1]
        assert atoms_of(m, cfg, f)["taken:e:():()"] is False
