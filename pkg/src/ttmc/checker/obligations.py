"""Fairness obligations derived from event declarations.

One obligation per (event, fair-index valuation):
  * ``just`` events get a justice obligation,
  * ``compassionate`` events get a compassion obligation,
  * events with a finite upper time bound are treated as just (real-time
    scheduling) even without a fairness keyword,
  * spontaneous unbounded events get none.

Both predicates are configuration-level: enabledness reads the implicit
clock (whose sign tracks the guard), and "taken" reads the last-transition
component p.
"""

from __future__ import annotations

from dataclasses import dataclass

from ttmc.elaborate import model as fm
from ttmc.lts.engine import engine_for


@dataclass(frozen=True)
class FairnessObligation:
    kind: str  # "justice" | "compassion"
    event: str
    fair: tuple
    clock_entry: int
    lower: int
    upper: int | None

    def enabled_key(self, key) -> bool:
        v = key[3][self.clock_entry]
        return v >= self.lower and (self.upper is None or v <= self.upper)

    def taken_key(self, key) -> bool:
        p = key[5]
        return isinstance(p, tuple) and p[0] == "e" and p[1] == self.clock_entry

    def enabled(self, cfg) -> bool:
        return self.enabled_key(cfg.key() if hasattr(cfg, "key") else cfg)

    def taken(self, cfg) -> bool:
        return self.taken_key(cfg.key() if hasattr(cfg, "key") else cfg)

    def describe(self) -> str:
        args = f"({', '.join(map(str, self.fair))})" if self.fair else ""
        return f"{self.kind}:{self.event}{args}"


def fairness_obligations(model: fm.FlatModel) -> list[FairnessObligation]:
    eng = engine_for(model)
    out: list[FairnessObligation] = []
    for ci, (ei, fv) in enumerate(eng.clock_entries):
        ev = model.events[ei]
        fairness = ev.fairness
        if fairness == "spontaneous" and ev.upper is not None:
            fairness = "just"
        if fairness == "spontaneous":
            continue
        kind = "compassion" if fairness == "compassionate" else "justice"
        out.append(
            FairnessObligation(
                kind=kind,
                event=ev.id,
                fair=fv,
                clock_entry=ci,
                lower=ev.lower,
                upper=ev.upper,
            )
        )
    return out
