"""Differential conformance of step's clock updates against a direct
transliteration of the two clock-update function tables (event and tick),
on randomized micro-models.  Also cross-checks timer saturation, the tick
urgency gate, and the offered e# transitions against independently
evaluated guards."""

from __future__ import annotations

import pytest

from tests.helpers import flatten_micro, random_micro_model
from tests.oracle_eval import guard_exists
from ttmc.diagnostics import LimitExceeded, SemanticsError
from ttmc.lts.engine import engine_for, succ_all
from ttmc.lts.explore import explore


def table_event_clocks(model, eng, pre_key, post_s, post_t, taken_ci):
    """Row-by-row transliteration of the event clock-update table."""
    s, t, m, c, x, p = pre_key
    taken_event = eng.clock_entries[taken_ci][0]
    out = []
    for ci, (ei, fv) in enumerate(eng.clock_entries):
        ev = model.events[ei]
        g_post = guard_exists(model, ev, post_s, post_t, fv)
        g_pre = guard_exists(model, ev, s, t, fv)
        if not g_post:
            out.append(-1)
        elif g_pre and ei != taken_event:
            out.append(c[ci])
        else:  # guard newly true, or this is the taken event
            out.append(0)
    return tuple(out)


def table_tick_clocks(model, eng, pre_key, post_t):
    """Row-by-row transliteration of the tick clock-update table; clocks of
    unbounded events saturate at l+1 (the documented finite-state cap)."""
    s, t, m, c, x, p = pre_key
    out = []
    for ci, (ei, fv) in enumerate(eng.clock_entries):
        ev = model.events[ei]
        g_post = guard_exists(model, ev, s, post_t, fv)
        g_pre = guard_exists(model, ev, s, t, fv)
        if not g_post:
            out.append(-1)
        elif not g_pre:
            out.append(0)
        else:
            cap = ev.upper if ev.upper is not None else ev.lower + 1
            out.append(min(c[ci] + 1, cap))
    return tuple(out)


def check_model(model) -> int:
    """Explore and verify every edge's clock vector; returns edges checked."""
    eng = engine_for(model)
    try:
        graph = explore(model, limit_states=400)
    except LimitExceeded:
        return 0
    checked = 0
    for node, key in enumerate(graph.keys):
        s, t, m, c, x, p = key

        # Enabled-set conformance at decision points.
        if x is None:
            offered = {raw[1] for raw, _ in graph.edges[node] if raw != "tick"
                       and raw[0] == "h"}
            expected = set()
            for ci, (ei, fv) in enumerate(eng.clock_entries):
                ev = model.events[ei]
                if guard_exists(model, ev, s, t, fv) and ev.lower <= c[ci] and (
                    ev.upper is None or c[ci] <= ev.upper
                ):
                    expected.add(ci)
            assert offered == expected, f"e# offer mismatch at node {node}"
            tick_offered = any(raw == "tick" for raw, _ in graph.edges[node])
            urgent = any(
                model.events[ei].upper is not None
                and c[ci] == model.events[ei].upper
                for ci, (ei, _) in enumerate(eng.clock_entries)
            )
            assert tick_offered == (not urgent), f"tick gate mismatch at {node}"

        for raw, tgt in graph.edges[node]:
            key2 = graph.keys[tgt]
            s2, t2, m2, c2, x2, p2 = key2
            if raw == "tick":
                assert s2 == s
                for j, tm in enumerate(model.timers):
                    if not m[j]:
                        assert t2[j] == t[j], "stopped timer moved on tick"
                    else:
                        assert t2[j] == min(t[j] + 1, tm.bound + 1), \
                            "timer increment/saturation mismatch"
                assert c2 == table_tick_clocks(model, eng, key, t2)
                checked += 1
            elif raw[0] == "e":
                assert c2 == table_event_clocks(model, eng, key, s2, t2, raw[1])
                checked += 1
            else:  # e# bookkeeping step: state, timers, clocks unchanged
                assert (s2, t2, c2) == (s, t, c)
    return checked


@pytest.mark.parametrize("chunk", range(10))
def test_clock_tables_on_random_models(chunk):
    """500 random micro-models, split into 10 chunks for progress output."""
    verified_models = 0
    for seed in range(chunk * 50, (chunk + 1) * 50):
        try:
            model = flatten_micro(seed)
        except Exception as err:  # pragma: no cover - generator must be valid
            raise AssertionError(
                f"seed {seed} produced an invalid model:\n"
                f"{random_micro_model(seed)}\n{err}"
            )
        try:
            edges = check_model(model)
        except SemanticsError as err:
            raise AssertionError(f"seed {seed}: {err}")
        if edges:
            verified_models += 1
    assert verified_models > 0
