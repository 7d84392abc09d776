"""Simulation sessions: fire, undo, random walks.

A session is a value: every operation returns a new session sharing the
model.  Replaying the recorded steps from the initial configuration always
reproduces the current configuration; undo recomputes by replay, which
doubles as a determinism check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from ttmc.diagnostics import Diagnostic, SemanticsError
from ttmc.elaborate import model as fm
from ttmc.lts import semantics as sem
from ttmc.lts.engine import engine_for


@dataclass(frozen=True)
class PendingStep:
    """A not-yet-fired step from an imported trace (cycle part of a lasso)."""

    transition: sem.TransitionName
    choice: tuple
    digest: str | None


@dataclass(frozen=True)
class Session:
    model: fm.FlatModel
    seed: int
    steps: tuple[tuple[sem.TransitionName, tuple], ...]
    configs: tuple[sem.Configuration, ...]
    rng_state: tuple
    pending: tuple[PendingStep, ...] = ()
    cycle_start: int | None = None  # step index where an imported cycle begins

    @property
    def current(self) -> sem.Configuration:
        return self.configs[-1]

    def digest(self) -> str:
        return sem.config_digest(self.model, self.current)


def session_new(model: fm.FlatModel, seed: int = 0) -> Session:
    rng = random.Random(seed)
    return Session(
        model=model,
        seed=seed,
        steps=(),
        configs=(sem.initial_configuration(model),),
        rng_state=rng.getstate(),
    )


def session_enabled(session: Session) -> list[tuple[sem.TransitionName, str]]:
    """Enabled transitions with a human-readable rendering; events sorted by
    name, tick last (annotated with the timers and clocks it would advance)."""
    model = session.model
    eng = engine_for(model)
    cfg = session.current
    out = []
    tick_entry = None
    for name in sem.enabled(model, cfg):
        if name.kind == "tick":
            advances = []
            for j, tm in enumerate(model.timers):
                if cfg.m[j] and cfg.t[j] <= tm.bound:
                    advances.append(f"{tm.name}={cfg.t[j]}->{cfg.t[j] + 1}")
            for ci, (ei, fv) in enumerate(eng.clock_entries):
                ev = eng.events[ei]
                if 0 <= cfg.c[ci] < ev.clock_cap:
                    label = sem.transition_name(model, ("h", ci)).render(model)[:-1]
                    advances.append(f"c({label})={cfg.c[ci]}->{cfg.c[ci] + 1}")
            text = "tick" + (f"  [{', '.join(advances)}]" if advances else "")
            tick_entry = (name, text)
        else:
            out.append((name, name.render(model)))
    out.sort(key=lambda pair: pair[1])
    if tick_entry is not None:
        out.append(tick_entry)
    return out


def _successors_for(session: Session, name: sem.TransitionName):
    eng = engine_for(session.model)
    raw = sem.encode_transition(session.model, name)
    return sem.step_raw(eng, session.current, raw)


def session_fire(
    session: Session,
    name: sem.TransitionName,
    choice: tuple | None = None,
) -> Session:
    """Fire one enabled transition.  When the step has several demonic
    successors and no explicit choice is given, one is drawn from the
    session's seeded generator."""
    succ = _successors_for(session, name)
    if choice is not None:
        choice = _normalize_choice(choice, session.model)
        matches = [(d, c) for d, c in succ if _normalize_choice(d, session.model) == choice]
        if not matches:
            raise SemanticsError(
                [Diagnostic("BadChoice",
                            f"choice {list(choice)!r} is not among the "
                            f"{len(succ)} successors of {name.render(session.model)}")]
            )
        draws, cfg = matches[0]
        rng_state = session.rng_state
    elif len(succ) == 1:
        draws, cfg = succ[0]
        rng_state = session.rng_state
    else:
        rng = random.Random()
        rng.setstate(session.rng_state)
        draws, cfg = succ[rng.randrange(len(succ))]
        rng_state = rng.getstate()
    return replace(
        session,
        steps=session.steps + ((name, draws),),
        configs=session.configs + (cfg,),
        rng_state=rng_state,
    )


def _normalize_choice(choice, model: fm.FlatModel) -> tuple:
    def norm(v):
        if isinstance(v, (list, tuple)):
            return tuple(norm(x) for x in v)
        if isinstance(v, str):  # symbol names map to their interned ids
            return model.symbol_ids.get(v, v)
        return v

    return tuple(norm(v) for v in choice)


def session_undo(session: Session, k: int = 1) -> Session:
    """Rewind k steps by replaying the remaining history from the start."""
    if k < 0 or k > len(session.steps):
        raise SemanticsError(
            [Diagnostic("BadIndex",
                        f"cannot undo {k} of {len(session.steps)} steps")]
        )
    kept = session.steps[: len(session.steps) - k]
    cycle_start = session.cycle_start
    if cycle_start is not None and cycle_start > len(kept):
        cycle_start = None  # rewound past the imported cycle marker
    fresh = session_new(session.model, session.seed)
    fresh = replace(fresh, rng_state=session.rng_state,
                    pending=session.pending, cycle_start=cycle_start)
    for name, draws in kept:
        fresh = session_fire(fresh, name, choice=draws)
    if fresh.current.key() != session.configs[len(kept)].key():
        raise SemanticsError(
            [Diagnostic("ReplayDivergence",
                        "replay after undo diverged from recorded history")]
        )
    return fresh


def session_random_walk(session: Session, steps: int) -> Session:
    """Fire `steps` uniformly random enabled transitions (tick included);
    demonic successors are equiprobable within the chosen transition."""
    cur = session
    for _ in range(steps):
        en = session_enabled(cur)
        if not en:
            raise SemanticsError(
                [Diagnostic("Deadlock", "no transition enabled")],
                configuration=cur.current,
            )
        rng = random.Random()
        rng.setstate(cur.rng_state)
        name, _ = en[rng.randrange(len(en))]
        cur = replace(cur, rng_state=rng.getstate())
        cur = session_fire(cur, name)
    return cur
