"""Trace files: line-delimited JSON, one step per line.

Line 1 is a header carrying the model identity hash; each following line
records a transition, the demonic draws taken, and the 64-bit digest of
the resulting configuration.  A ``cycle`` marker line separates the prefix
from the repeatable cycle when the trace came from a checker lasso.
Replay validates the digest chain; any mismatch is a ReplayDivergence.
"""

from __future__ import annotations

import json
from dataclasses import replace

from ttmc.diagnostics import Diagnostic, SemanticsError
from ttmc.elaborate import model as fm
from ttmc.elaborate.dump import model_digest
from ttmc.lts import semantics as sem
from ttmc.sim.session import PendingStep, Session, session_fire, session_new


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _step_line(model: fm.FlatModel, name: sem.TransitionName, draws,
               digest: str) -> str:
    return _dumps(
        {
            "kind": "step",
            "transition": name.to_json(model),
            "choice": _plain(draws),
            "digest": digest,
        }
    )


def _plain(v):
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


def trace_export(session: Session) -> str:
    """Serialize the session history (plus any imported pending cycle)."""
    model = session.model
    lines = [_dumps({"kind": "header", "model": model_digest(model)})]
    for k, (name, draws) in enumerate(session.steps):
        if session.cycle_start is not None and k == session.cycle_start:
            lines.append(_dumps({"kind": "cycle"}))
        digest = sem.config_digest(model, session.configs[k + 1])
        lines.append(_step_line(model, name, draws, digest))
    if session.pending:
        if session.cycle_start is None or session.cycle_start >= len(session.steps):
            lines.append(_dumps({"kind": "cycle"}))
        for p in session.pending:
            lines.append(_step_line(model, p.transition, p.choice, p.digest))
    return "\n".join(lines) + "\n"


def _parse_transition(model: fm.FlatModel, obj: dict) -> sem.TransitionName:
    if obj.get("kind") == "tick":
        return sem.TICK
    return sem.TransitionName(
        kind=obj["kind"],
        event=obj["event"],
        fair=tuple(obj.get("fair", ())),
        demonic=tuple(obj.get("demonic", ())),
    )


def parse_trace(model: fm.FlatModel, text: str):
    """Returns (steps, cycle_start) where steps are (name, choice, digest)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SemanticsError([Diagnostic("ModelMismatch", "empty trace file")])
    header = json.loads(lines[0])
    if header.get("kind") != "header":
        raise SemanticsError(
            [Diagnostic("ModelMismatch", "trace file has no header line")]
        )
    if header.get("model") != model_digest(model):
        raise SemanticsError(
            [Diagnostic("ModelMismatch",
                        "trace was recorded against a different model")]
        )
    steps = []
    cycle_start = None
    for ln in lines[1:]:
        obj = json.loads(ln)
        if obj.get("kind") == "cycle":
            cycle_start = len(steps)
            continue
        if obj.get("kind") != "step":
            raise SemanticsError(
                [Diagnostic("ModelMismatch", f"unknown trace line {obj.get('kind')!r}")]
            )
        steps.append(
            (
                _parse_transition(model, obj["transition"]),
                tuple(_unplain(v) for v in obj.get("choice") or ()),
                obj.get("digest"),
            )
        )
    return steps, cycle_start


def _unplain(v):
    if isinstance(v, list):
        return tuple(_unplain(x) for x in v)
    return v


def trace_import(model: fm.FlatModel, text: str, seed: int = 0) -> Session:
    """Rebuild a session from a trace.  The prefix is replayed immediately;
    cycle steps stay pending so they can be stepped through one by one.
    Digest mismatches raise ReplayDivergence."""
    steps, cycle_start = parse_trace(model, text)
    session = session_new(model, seed)
    replay_until = cycle_start if cycle_start is not None else len(steps)
    for k, (name, choice, digest) in enumerate(steps):
        if k >= replay_until:
            break
        session = session_fire(session, name, choice=choice)
        if digest is not None and session.digest() != digest:
            raise SemanticsError(
                [Diagnostic("ReplayDivergence",
                            f"digest mismatch at step {k + 1}")]
            )
    pending = tuple(
        PendingStep(name, choice, digest)
        for name, choice, digest in steps[replay_until:]
    )
    return replace(session, pending=pending, cycle_start=cycle_start)


def fire_pending(session: Session) -> Session:
    """Fire the next pending (imported) step and validate its digest."""
    if not session.pending:
        raise SemanticsError(
            [Diagnostic("BadIndex", "no pending trace steps")]
        )
    head, rest = session.pending[0], session.pending[1:]
    nxt = session_fire(session, head.transition, choice=head.choice)
    if head.digest is not None and nxt.digest() != head.digest:
        raise SemanticsError(
            [Diagnostic("ReplayDivergence", "digest mismatch on pending step")]
        )
    return replace(nxt, pending=rest, cycle_start=session.cycle_start)


def lasso_to_trace(model: fm.FlatModel, lasso) -> str:
    """Serialize a checker counterexample in the simulator trace format."""
    lines = [_dumps({"kind": "header", "model": model_digest(model)})]
    prev = lasso.init
    for name, cfg in lasso.prefix:
        draws = _find_draws(model, prev, name, cfg)
        lines.append(_step_line(model, name, draws, sem.config_digest(model, cfg)))
        prev = cfg
    if lasso.cycle:
        lines.append(_dumps({"kind": "cycle"}))
        for name, cfg in lasso.cycle:
            draws = _find_draws(model, prev, name, cfg)
            lines.append(
                _step_line(model, name, draws, sem.config_digest(model, cfg))
            )
            prev = cfg
    return "\n".join(lines) + "\n"


def _find_draws(model: fm.FlatModel, cfg: sem.Configuration,
                name: sem.TransitionName, target: sem.Configuration) -> tuple:
    from ttmc.lts.engine import engine_for

    eng = engine_for(model)
    raw = sem.encode_transition(model, name)
    for draws, nxt in sem.step_raw(eng, cfg, raw):
        if nxt.key() == target.key():
            return draws
    raise SemanticsError(
        [Diagnostic("ReplayDivergence",
                    "lasso step does not match any successor")]
    )
