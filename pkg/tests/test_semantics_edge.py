"""Edge semantics: runtime element collisions, queue capacity, feasibility
guards with primes, conditional demonic draws, monotonicity across
restarts, and event-atom granularity."""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from ttmc.diagnostics import SemanticsError
from ttmc.elaborate.flatten import flatten_source
from ttmc.lts import enabled, initial_configuration, step
from ttmc.lts.explore import explore
from ttmc.syntax.ltl import parse_ltl


def fire(model, cfg, label):
    names = {n.render(model): n for n in enabled(model, cfg)}
    assert label in names, f"{label} not in {sorted(names)}"
    return step(model, cfg, names[label]).successors


class TestArrayElementCollisions:
    def test_distinct_dynamic_elements_merge(self):
        m = flatten_source("""
types IX = 0 .. 2 end
module M ()
  locals arr : array IX of 0 .. 9 := 0 ; i : IX := 0 ; j : IX := 1 end
  events e when true do arr[i] := 5, arr[j] := 7 end end
end
""")
        cfg = initial_configuration(m)
        cfg = fire(m, cfg, "e#")[0][1]
        cfg = fire(m, cfg, "e")[0][1]
        assert cfg.s[0] == (5, 7, 0)

    def test_same_dynamic_element_is_runtime_double_assignment(self):
        m = flatten_source("""
types IX = 0 .. 2 end
module M ()
  locals arr : array IX of 0 .. 9 := 0 ; i : IX := 1 ; j : IX := 1 end
  events e when true do arr[i] := 5, arr[j] := 7 end end
end
""")
        cfg = initial_configuration(m)
        cfg = fire(m, cfg, "e#")[0][1]
        with pytest.raises(SemanticsError) as err:
            fire(m, cfg, "e")
        assert err.value.code == "DoubleAssignment"

    def test_out_of_range_dynamic_index(self):
        m = flatten_source("""
types IX = 0 .. 2 end
module M ()
  locals arr : array IX of 0 .. 9 := 0 ; k : 0 .. 5 := 4 end
  events e when true do arr[k] := 5 end end
end
""")
        cfg = initial_configuration(m)
        cfg = fire(m, cfg, "e#")[0][1]
        with pytest.raises(SemanticsError) as err:
            fire(m, cfg, "e")
        assert err.value.code == "EvaluationError"


class TestQueues:
    SRC = """
module M ()
  locals q : queue[0 .. 3](2) ; n : 0 .. 5 := 0 end
  events
    push when true do q.Enqueue(1), n := n + 1 end ;
    pop when q.Count() > 0 do q.Dequeue() end
  end
end
"""

    def test_enqueue_overflow(self):
        m = flatten_source(self.SRC)
        cfg = initial_configuration(m)
        for _ in range(2):
            cfg = fire(m, cfg, "push#")[0][1]
            cfg = fire(m, cfg, "push")[0][1]
        assert cfg.s[0] == (1, 1)
        cfg = fire(m, cfg, "push#")[0][1]
        with pytest.raises(SemanticsError) as err:
            fire(m, cfg, "push")
        assert err.value.code == "EvaluationError"
        assert "full queue" in str(err.value)

    def test_fifo_order(self):
        m = flatten_source("""
module M ()
  locals q : queue[0 .. 3](3) ; k : 0 .. 3 := 0 ; got : 0 .. 3 := 0 end
  events
    push when k < 3 do q.Enqueue(k), k := k + 1 end ;
    pop when q.Count() > 0 do got := q.First(), q.Dequeue() end
  end
end
""")
        cfg = initial_configuration(m)
        for _ in range(3):
            cfg = fire(m, cfg, "push#")[0][1]
            cfg = fire(m, cfg, "push")[0][1]
        order = []
        for _ in range(3):
            cfg = fire(m, cfg, "pop#")[0][1]
            cfg = fire(m, cfg, "pop")[0][1]
            order.append(cfg.s[m.var_index["got"]])
        assert order == [0, 1, 2]


class TestFeasibilityGuards:
    SRC = """
globals v : 0 .. 4 := 0 ; seen : 0 .. 4 := 0 end
module P (out v : 0 .. 4)
  events gen when true do v :: 1 .. 4 end end
end
module C (in v : 0 .. 4, out seen : 0 .. 4)
  depends p : P end
  events resp sync p.gen as act when v' == 3 do seen := v' end end
end
instances env = P(out v) ; c = C(in v, out seen) with p := env end end
grp ::= env || c
system = grp
"""

    def test_primed_guard_prunes_infeasible_draws(self):
        m = flatten_source(self.SRC)
        cfg = initial_configuration(m)
        assert cfg.c == (0,)  # feasible: the draw v=3 exists
        cfg = fire(m, cfg, "grp.act#")[0][1]
        succ = fire(m, cfg, "grp.act")
        assert len(succ) == 1
        (_, nxt) = succ[0]
        assert nxt.s == (3, 3)

    def test_infeasible_guard_means_disabled(self):
        src = self.SRC.replace("when v' == 3", "when v' == 0")  # never drawn
        m = flatten_source(src)
        cfg = initial_configuration(m)
        assert cfg.c == (-1,)
        assert [n.render(m) for n in enabled(m, cfg)] == ["tick"]

    def test_primed_guard_outside_sync_rejected(self):
        from ttmc.diagnostics import ElaborationError

        with pytest.raises(ElaborationError):
            flatten_source("""
module M ()
  locals v : 0 .. 4 := 0 end
  events e when v' == 3 do v :: 1 .. 4 end end
end
""")


class TestConditionalDemonic:
    def test_conditional_scalar_draw(self):
        m = flatten_source("""
module M ()
  locals c : bool := false ; v : 0 .. 4 := 0 end
  events
    e when true do if c then v :: 1 .. 3 else skip fi, c := !c end
  end
end
""")
        cfg = initial_configuration(m)
        cfg = fire(m, cfg, "e#")[0][1]
        succ = fire(m, cfg, "e")  # c false: the skip branch, one successor
        assert len(succ) == 1 and succ[0][1].s == (True, 0)
        cfg = succ[0][1]
        cfg = fire(m, cfg, "e#")[0][1]
        succ = fire(m, cfg, "e")  # c true: three draws
        assert sorted(s.s[1] for _, s in succ) == [1, 2, 3]

    def test_mixed_deterministic_and_demonic_branches(self):
        m = flatten_source("""
module M ()
  locals c : bool := false ; v : 0 .. 4 := 0 end
  events
    e when true do if c then v :: 1 .. 2 else v := 4 fi, c := !c end
  end
end
""")
        cfg = initial_configuration(m)
        cfg = fire(m, cfg, "e#")[0][1]
        succ = fire(m, cfg, "e")
        assert [s.s[1] for _, s in succ] == [4]
        cfg = succ[0][1]
        cfg = fire(m, cfg, "e#")[0][1]
        succ = fire(m, cfg, "e")
        assert sorted(s.s[1] for _, s in succ) == [1, 2]

    def test_conditional_whole_array_draw(self):
        m = flatten_source("""
types IX = 0 .. 1 end
module M ()
  locals c : bool := false ; arr : array IX of 0 .. 1 := 0 end
  events
    e when true do if c then arr :: array 0 .. 1 else skip fi, c := !c end
  end
end
""")
        cfg = initial_configuration(m)
        cfg = fire(m, cfg, "e#")[0][1]
        succ = fire(m, cfg, "e")
        assert len(succ) == 1  # skip branch
        cfg = succ[0][1]
        cfg = fire(m, cfg, "e#")[0][1]
        succ = fire(m, cfg, "e")
        assert sorted(s.s[1] for _, s in succ) == [(0, 0), (0, 1), (1, 0), (1, 1)]


class TestMonotonicity:
    def test_restart_by_another_event_breaks_mono(self):
        m = flatten_source("""
module M ()
  timers tm : 0 .. 4 end
  locals n : 0 .. 5 := 0 end
  events
    starter when n == 0 start tm do n := 1 end ;
    restarter when n == 1 start tm do n := 2 end
  end
end
""")
        f = parse_ltl("mono(tm)", m)
        from ttmc.checker.atoms import atoms_of

        cfg = initial_configuration(m)
        cfg = fire(m, cfg, "starter#")[0][1]
        cfg = fire(m, cfg, "starter")[0][1]
        cfg = fire(m, cfg, "tick")[0][1]
        assert atoms_of(m, cfg, f)["mono(tm)"] is True
        # The restart's e# step is the observable monotonicity break.
        cfg = fire(m, cfg, "restarter#")[0][1]
        assert atoms_of(m, cfg, f)["mono(tm)"] is False
        cfg = fire(m, cfg, "restarter")[0][1]
        assert atoms_of(m, cfg, f)["mono(tm)"] is True
        assert cfg.t == (0,)


class TestEventAtomGranularity:
    def test_demonic_valuation_distinguished_in_p(self):
        m = flatten_source("""
module M ()
  locals v : 0 .. 2 := 0 end
  events pick (y : 0 .. 1) just when true do v := 1 end end
end
""")
        f1 = parse_ltl("<> pick(0)", m)
        f2 = parse_ltl("<> (pick(0) || pick(1))", m)
        from ttmc.checker import check

        assert not check(m, f1).holds  # runs may always choose y = 1
        assert check(m, f2).holds  # but some pick occurs (justice)


class TestHypothesisProperties:
    @given(st.integers(0, 10_000), st.integers(1, 25))
    @settings(max_examples=25, deadline=None)
    def test_walk_then_undo_all_reaches_initial(self, seed, steps):
        from tests.conftest import flat_model
        from ttmc.sim import session_new, session_random_walk, session_undo

        m = flat_model("train_refined")
        s = session_random_walk(session_new(m, seed), steps)
        back = session_undo(s, steps)
        assert back.current.key() == initial_configuration(m).key()

    @given(st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_trace_roundtrip_random_walks(self, seed):
        from tests.conftest import flat_model
        from ttmc.sim import session_new, session_random_walk, trace_export, trace_import

        m = flat_model("train_abstract")
        s = session_random_walk(session_new(m, seed), 18)
        text = trace_export(s)
        assert trace_import(m, text, seed=seed).digest() == s.digest()
