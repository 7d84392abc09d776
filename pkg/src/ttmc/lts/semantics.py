"""Configurations and the e#/e/tick transition relation.

A configuration is the 6-tuple (s, t, m, c, x, p):
  s  variable state          t  timer values
  m  timer monotonicity      c  implicit event clocks
  x  pending event (after its e# step) or None
  p  last transition taken (event, e# marker, tick, or None)

Sequencing: every event occurrence e(x) is immediately preceded by its
monotonicity-breaking step e#(x); tick never intervenes because it requires
x = None.  Tick is blocked while any clock sits at its event's finite upper
bound (urgency).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from hashlib import blake2b

from ttmc.diagnostics import Diagnostic, SemanticsError
from ttmc.elaborate import model as fm
from ttmc.lts.engine import Engine, EvalError, engine_for


@dataclass(frozen=True)
class TransitionName:
    kind: str  # "event" | "hash" | "tick"
    event: str | None = None
    fair: tuple = ()
    demonic: tuple = ()

    def render(self, model: fm.FlatModel) -> str:
        if self.kind == "tick":
            return "tick"
        args = [_fmt(v) for v in self.fair]
        dargs = [_fmt(v) for v in self.demonic]
        text = self.event
        if args or dargs:
            text += "(" + ", ".join(args)
            if dargs:
                text += "; " + ", ".join(dargs)
            text += ")"
        return text + ("#" if self.kind == "hash" else "")

    def to_json(self, model: fm.FlatModel) -> dict:
        if self.kind == "tick":
            return {"kind": "tick"}
        return {
            "kind": self.kind,
            "event": self.event,
            "fair": list(self.fair),
            "demonic": list(self.demonic),
        }


TICK = TransitionName("tick")


def _fmt(v) -> str:
    # Index values are decoded: symbol names (str), ints, or bools.
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


@dataclass(frozen=True)
class Configuration:
    """Immutable configuration over a fixed model; equality and hashing use
    the full 6-tuple (p included: LTL event atoms read it)."""

    s: tuple
    t: tuple
    m: tuple
    c: tuple
    x: int | None  # pending clock-entry index
    p: object  # ('e', ci, dem) | ('h', ci) | 'tick' | None

    def key(self) -> tuple:
        return (self.s, self.t, self.m, self.c, self.x, self.p)


@dataclass(frozen=True)
class StepResult:
    successors: tuple[tuple[TransitionName, Configuration], ...]


# ── public operations ────────────────────────────────────────────


def initial_configuration(model: fm.FlatModel) -> Configuration:
    eng = engine_for(model)
    return Configuration(
        s=eng.s0,
        t=eng.t0,
        m=tuple(True for _ in model.timers),
        c=eng.initial_clocks(),
        x=None,
        p=None,
    )


def transition_name(model: fm.FlatModel, raw, decoded: bool = True) -> TransitionName:
    """Decode an engine-level transition representation."""
    eng = engine_for(model)
    if raw == "tick":
        return TICK
    kind, ci = raw[0], raw[1]
    ei, fv = eng.clock_entries[ci]
    ev = model.events[ei]
    fair = _decode_values(model, ev.f_ind, fv) if decoded else fv
    if kind == "h":
        return TransitionName("hash", ev.id, fair)
    dem = _decode_values(model, ev.d_ind, raw[2]) if decoded else raw[2]
    return TransitionName("event", ev.id, fair, dem)


def _decode_values(model: fm.FlatModel, ind, values) -> tuple:
    out = []
    for (_, ty), v in zip(ind, values):
        out.append(model.symbols[v] if isinstance(ty, fm.TEnum) else v)
    return tuple(out)


def _encode_values(model: fm.FlatModel, ind, values) -> tuple:
    out = []
    for (_, ty), v in zip(ind, values):
        if isinstance(ty, fm.TEnum):
            if v not in model.symbol_ids:
                raise SemanticsError(
                    [Diagnostic("NotEnabled", f"unknown index value {v!r}")]
                )
            out.append(model.symbol_ids[v])
        else:
            out.append(v)
    return tuple(out)


def enabled_raw(eng: Engine, cfg: Configuration) -> list:
    """Engine-level enabled transitions: ('h', ci) / ('e', ci, dem) / 'tick'."""
    out = []
    if cfg.x is None:
        for ci in range(len(eng.clock_entries)):
            if cfg.c[ci] >= 0 and eng.entry_enabled(cfg.c, ci):
                out.append(("h", ci))
        if eng.tick_allowed(cfg.c):
            out.append("tick")
        return out
    ci = cfg.x
    ei, fv = eng.clock_entries[ci]
    for dem in eng.events[ei].dem_feasible(cfg.s, cfg.t, *fv):
        out.append(("e", ci, dem))
    return out


def enabled(model: fm.FlatModel, cfg: Configuration) -> list[TransitionName]:
    eng = engine_for(model)
    return [transition_name(model, raw) for raw in enabled_raw(eng, cfg)]


def step_raw(eng: Engine, cfg: Configuration, raw):
    """Successors of one transition: list of (draws, Configuration)."""
    if raw == "tick":
        if cfg.x is not None or not eng.tick_allowed(cfg.c):
            raise SemanticsError([Diagnostic("NotEnabled", "tick is not enabled")])
        t1 = eng.timers_after_tick(cfg.t, cfg.m)
        c1 = eng.clocks_after_tick(cfg.s, t1, cfg.c)
        return [((), Configuration(cfg.s, t1, cfg.m, c1, None, "tick"))]
    kind, ci = raw[0], raw[1]
    ei, fv = eng.clock_entries[ci]
    ev = eng.events[ei]
    if kind == "h":
        if cfg.x is not None or cfg.c[ci] < 0 or not eng.entry_enabled(cfg.c, ci):
            raise SemanticsError(
                [Diagnostic("NotEnabled", f"{ev.id} is not enabled for its e# step")]
            )
        m1 = list(cfg.m)
        for j in ev.start_pos:
            m1[j] = False
        for j in ev.stop_pos:
            m1[j] = False
        return [
            ((), Configuration(cfg.s, cfg.t, tuple(m1), cfg.c, ci, ("h", ci)))
        ]
    # kind == "e"
    dem = raw[2]
    if cfg.x != ci:
        raise SemanticsError(
            [Diagnostic("NotEnabled", f"{ev.id} has no pending e# step")]
        )
    try:
        branches = ev.successors(cfg.s, cfg.t, *fv)
    except EvalError as err:
        raise SemanticsError(
            [Diagnostic(err.code, str(err))], configuration=cfg
        ) from err
    out = []
    t_template = list(cfg.t)
    for j in ev.start_pos:
        t_template[j] = 0
    m1 = list(cfg.m)
    for j in ev.start_pos:
        m1[j] = True  # restarted timers are monotone again; stopped stay frozen
    m1 = tuple(m1)
    t1 = tuple(t_template)
    for got_dem, draws, s1 in branches:
        if got_dem != dem:
            continue
        c1 = eng.clocks_after_event(s1, t1, cfg.c, ei)
        out.append(
            (draws, Configuration(s1, t1, m1, c1, None, ("e", ci, dem)))
        )
    if not out:
        raise SemanticsError(
            [Diagnostic("NotEnabled", f"{ev.id} has no successor for this valuation")]
        )
    return out


def step(model: fm.FlatModel, cfg: Configuration, name: TransitionName) -> StepResult:
    eng = engine_for(model)
    raw = encode_transition(model, name)
    succ = step_raw(eng, cfg, raw)
    return StepResult(tuple((name, c) for _, c in succ))


def encode_transition(model: fm.FlatModel, name: TransitionName):
    eng = engine_for(model)
    if name.kind == "tick":
        return "tick"
    if name.event not in model.event_index:
        raise SemanticsError(
            [Diagnostic("NotEnabled", f"unknown event {name.event!r}")]
        )
    ev = model.event(name.event)
    fv = _encode_values(model, ev.f_ind, name.fair)
    key = (name.event, fv)
    if key not in eng.clock_index:
        raise SemanticsError(
            [Diagnostic("NotEnabled", f"bad index valuation for {name.event!r}")]
        )
    ci = eng.clock_index[key]
    if name.kind == "hash":
        return ("h", ci)
    dem = _encode_values(model, ev.d_ind, name.demonic)
    return ("e", ci, dem)


# ── rendering / digests ──────────────────────────────────────────


def config_to_json(model: fm.FlatModel, cfg: Configuration) -> dict:
    eng = engine_for(model)
    variables = {
        v.name: model.decode_value(v.type, cfg.s[i])
        for i, v in enumerate(model.variables)
    }
    timers = {
        tm.name: {"value": cfg.t[j], "mono": bool(cfg.m[j])}
        for j, tm in enumerate(model.timers)
    }
    clocks = []
    for ci, (ei, fv) in enumerate(eng.clock_entries):
        ev = model.events[ei]
        clocks.append(
            {
                "event": ev.id,
                "fair": list(_decode_values(model, ev.f_ind, fv)),
                "value": cfg.c[ci],
                "urgent": ev.upper is not None and cfg.c[ci] == ev.upper,
            }
        )
    pending = None
    if cfg.x is not None:
        pending = transition_name(model, ("h", cfg.x)).to_json(model)
    last = None
    if cfg.p is not None:
        last = transition_name(model, cfg.p).to_json(model)
    return {
        "variables": variables,
        "timers": timers,
        "clocks": clocks,
        "pending": pending,
        "last": last,
    }


def config_digest(model: fm.FlatModel, cfg: Configuration) -> str:
    """64-bit stable digest of the canonical configuration serialization."""
    canon = json.dumps(
        config_to_json(model, cfg), sort_keys=True, separators=(",", ":")
    )
    return blake2b(canon.encode(), digest_size=8).hexdigest()


def validate_configuration(model: fm.FlatModel, cfg: Configuration) -> list[str]:
    """Invariant check used by tests: timer ranges, clock ranges, sequencing."""
    eng = engine_for(model)
    problems = []
    for j, tm in enumerate(model.timers):
        if not 0 <= cfg.t[j] <= tm.bound + 1:
            problems.append(f"timer {tm.name} = {cfg.t[j]} outside 0..{tm.bound + 1}")
    for ci, (ei, fv) in enumerate(eng.clock_entries):
        ev = eng.events[ei]
        v = cfg.c[ci]
        if v < -1:
            problems.append(f"clock {ev.id}{fv} below -1")
        if ev.upper is not None and v > ev.upper:
            problems.append(f"clock {ev.id}{fv} above its upper bound")
        g = ev.guard_any(cfg.s, cfg.t, *fv)
        if (v >= 0) != bool(g):
            problems.append(f"clock {ev.id}{fv} sign disagrees with its guard")
    if cfg.x is not None:
        if cfg.p != ("h", cfg.x):
            problems.append("pending event without matching e# marker in p")
    return problems
