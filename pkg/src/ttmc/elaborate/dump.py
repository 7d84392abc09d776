"""Deterministic JSON rendering of a FlatModel and its dependency graphs.

Used by ``flatten --dump`` for golden-file testing and as the model
identity hash for trace files: the same source always dumps to the same
bytes (sorted keys, declaration-order lists).
"""

from __future__ import annotations

import json
from hashlib import blake2b

from ttmc.elaborate import model as fm
from ttmc.syntax import ast
from ttmc.syntax.pretty import pretty_expr


def _type_str(model: fm.FlatModel, t: fm.Type) -> str:
    if isinstance(t, fm.TEnum):
        names = ", ".join(model.symbols[m] for m in t.members)
        base = f"{{ {names} }}"
        return f"{t.name} = {base}" if t.name else base
    if isinstance(t, fm.TArray):
        return f"array {_type_str(model, t.index)} of {_type_str(model, t.elem)}"
    if isinstance(t, fm.TQueue):
        return f"queue[{_type_str(model, t.elem)}]({t.capacity})"
    return str(t)


def _site_json(model: fm.FlatModel, site: fm.WriteSite) -> dict:
    out: dict = {}
    out["cond"] = pretty_expr(site.cond) if site.cond is not None else None
    out["index"] = pretty_expr(site.index) if site.index is not None else None
    if site.value is not None:
        out["value"] = pretty_expr(site.value)
    else:
        out["choice"] = [_decode_plain(model, v) for v in site.demonic]
        if site.demonic_array:
            out["elementwise"] = True
    return out


def _decode_plain(model: fm.FlatModel, v):
    # Demonic domains hold encoded scalars; symbol ids decode by position.
    if isinstance(v, bool) or not isinstance(v, int):
        return v
    if 0 <= v < len(model.symbols):
        return v  # ambiguous without a type; keep raw for determinism
    return v


def dump_model(model: fm.FlatModel) -> dict:
    events = []
    for e in model.events:
        events.append(
            {
                "id": e.id,
                "fair_indices": [
                    {"name": n, "type": _type_str(model, t)} for n, t in e.f_ind
                ],
                "demonic_indices": [
                    {"name": n, "type": _type_str(model, t)} for n, t in e.d_ind
                ],
                "lower": e.lower,
                "upper": e.upper,
                "fairness": e.fairness,
                "guard": pretty_expr(e.guard),
                "start": list(e.start),
                "stop": list(e.stop),
                "members": list(e.members),
                "action": [
                    {
                        "var": p.var,
                        "writes": [_site_json(model, s) for s in p.sites],
                    }
                    for p in e.action
                ],
                "queue_effects": [
                    {
                        "var": q.var,
                        "op": q.op,
                        "cond": pretty_expr(q.cond) if q.cond is not None else None,
                        "arg": pretty_expr(q.arg) if q.arg is not None else None,
                    }
                    for q in e.queue_effects
                ],
            }
        )
    graphs = None
    if model.graphs is not None:
        g = model.graphs
        graphs = {
            "module_dependency": {
                "nodes": list(g.module_nodes),
                "edges": [list(e) for e in g.module_edges],
            },
            "event_dependency": {
                "nodes": list(g.event_nodes),
                "edges": [list(e) for e in g.event_edges],
            },
            "sync_sets": [
                {
                    "members": list(s.members),
                    "compound": s.compound_name,
                    "module_component": list(s.module_component),
                }
                for s in g.sync_sets
            ],
        }
    return {
        "variables": [
            {
                "name": v.name,
                "type": _type_str(model, v.type),
                "mode": v.mode,
                "init": model.decode_value(v.type, v.init),
            }
            for v in sorted(model.variables, key=lambda v: v.name)
        ],
        "timers": [
            {"name": t.name, "bound": t.bound, "init": t.init}
            for t in sorted(model.timers, key=lambda t: t.name)
        ],
        "events": events,
        "types": {
            name: _type_str(model, t) for name, t in sorted(model.types.items())
        },
        "constants": dict(sorted(model.constants.items())),
        "graphs": graphs,
        "properties": [{"name": n, "formula": s} for n, s, _ in model.properties],
    }


def dump_json(model: fm.FlatModel) -> str:
    return json.dumps(dump_model(model), sort_keys=True, indent=2) + "\n"


def model_digest(model: fm.FlatModel) -> str:
    """Stable identity hash used to pair traces with their model."""
    canon = json.dumps(dump_model(model), sort_keys=True, separators=(",", ":"))
    return blake2b(canon.encode(), digest_size=8).hexdigest()
