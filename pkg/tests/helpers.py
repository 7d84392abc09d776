"""Random micro-model generation for differential semantics tests."""

from __future__ import annotations

import random

from ttmc.elaborate.flatten import flatten_source

FAIRNESS = ["", "just", "compassionate"]


def random_micro_model(seed: int) -> str:
    """A tiny well-formed single-module model: 2-3 scalar variables, at most
    one timer, 2-3 events with random guards, bounds, indices, and actions.
    All assigned values stay inside the declared ranges."""
    rng = random.Random(seed)
    n_vars = rng.randint(2, 3)
    vars_: list[tuple[str, str, int]] = []  # (name, kind, hi)
    decls = []
    for k in range(n_vars):
        name = f"v{k}"
        if rng.random() < 0.35:
            vars_.append((name, "bool", 1))
            decls.append(f"{name} : bool := {'true' if rng.random() < 0.3 else 'false'}")
        else:
            hi = rng.randint(1, 3)
            vars_.append((name, "int", hi))
            decls.append(f"{name} : 0 .. {hi} := {rng.randint(0, hi)}")

    timers = []
    if rng.random() < 0.5:
        timers.append(("tm", rng.randint(1, 2)))

    def atom() -> str:
        if timers and rng.random() < 0.25:
            tname, bound = timers[0]
            return f"{tname} {rng.choice(['<', '<=', '==', '>='])} {rng.randint(0, bound + 1)}"
        name, kind, hi = rng.choice(vars_)
        if kind == "bool":
            return name if rng.random() < 0.5 else f"!{name}"
        return f"{name} {rng.choice(['==', '!=', '<', '<=', '>', '>='])} {rng.randint(0, hi)}"

    def guard() -> str:
        terms = [atom() for _ in range(rng.randint(1, 3))]
        op = rng.choice([" && ", " || "])
        return op.join(terms)

    def assignment(used: set[str]) -> str:
        remaining = [v for v in vars_ if v[0] not in used]
        name, kind, hi = rng.choice(remaining)
        used.add(name)
        if kind == "bool":
            rhs = rng.choice(["true", "false", f"!{name}"])
        else:
            choices = [str(rng.randint(0, hi))]
            for other, okind, ohi in vars_:
                if okind == "int" and ohi <= hi:
                    choices.append(other)
            rhs = rng.choice(choices)
        if rng.random() < 0.2 and kind == "int":
            return f"{name} :: 0 .. {hi}"
        return f"{name} := {rhs}"

    events = []
    n_events = rng.randint(2, 3)
    for k in range(n_events):
        head = f"e{k}"
        if rng.random() < 0.3:
            fair_kw = "fair " if rng.random() < 0.5 else ""
            head += f" (ix : {fair_kw}0 .. 1)"
        bounded = rng.random() < 0.5
        fairness = ""
        if bounded:
            lo = rng.randint(0, 2)
            if rng.random() < 0.5:
                hi = rng.randint(lo, 3)
                head += f" [{lo}, {hi}]"
            else:
                head += f" [{lo}, *]"
                fairness = rng.choice(FAIRNESS)
        else:
            fairness = rng.choice(FAIRNESS)
        if fairness:
            head += f" {fairness}"
        clauses = [f"      when {guard()}"]
        if timers and rng.random() < 0.4:
            clauses.append(f"      start {timers[0][0]}")
        if timers and rng.random() < 0.2:
            clauses.append(f"      stop {timers[0][0]}")
        used: set[str] = set()
        body = ", ".join(assignment(used) for _ in range(rng.randint(1, min(2, n_vars))))
        clauses.append(f"      do {body} end")
        events.append(head + "\n" + "\n".join(clauses))

    timer_block = ""
    if timers:
        items = " ;\n    ".join(f"{n} : 0 .. {b}" for n, b in timers)
        timer_block = f"  timers\n    {items}\n  end\n"
    local_block = "  locals\n    " + " ;\n    ".join(decls) + "\n  end\n"
    event_block = "  events\n    " + " ;\n\n    ".join(events) + "\n  end\n"
    return f"module M ()\n{local_block}{timer_block}{event_block}end\n"


def flatten_micro(seed: int):
    return flatten_source(random_micro_model(seed))
