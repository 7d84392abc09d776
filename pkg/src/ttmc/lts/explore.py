"""Explicit-state reachability over the configuration graph.

Configurations are deduplicated on the full 6-tuple.  The final graph is a
fixpoint of the step relation, so it does not depend on expansion order;
node numbering follows deterministic BFS discovery order in the
single-worker case, and exports sort nodes canonically either way.
"""

from __future__ import annotations

import json
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ttmc.diagnostics import Diagnostic, LimitExceeded, SemanticsError
from ttmc.elaborate import model as fm
from ttmc.lts import semantics as sem
from ttmc.lts.engine import EvalError, engine_for, succ_all

DEFAULT_STATE_LIMIT = 1_000_000


@dataclass
class LtsGraph:
    model: fm.FlatModel
    keys: list[tuple]  # configuration keys in discovery order
    index: dict[tuple, int]
    edges: list[list[tuple[object, int]]]  # per node: (raw transition, target)
    stats: dict = field(default_factory=dict)

    def successors(self, node: int):
        return self.edges[node]

    @property
    def configs(self):
        return [sem.Configuration(*k) for k in self.keys]

    def config_at(self, node: int) -> sem.Configuration:
        return sem.Configuration(*self.keys[node])

    def to_json(self) -> dict:
        """Deterministic export for small models: nodes sorted by digest."""
        order = sorted(
            range(len(self.keys)),
            key=lambda i: sem.config_digest(self.model, self.config_at(i)),
        )
        rank = {node: k for k, node in enumerate(order)}
        nodes = []
        for node in order:
            cfg = self.config_at(node)
            nodes.append(
                {
                    "id": rank[node],
                    "digest": sem.config_digest(self.model, cfg),
                    "configuration": sem.config_to_json(self.model, cfg),
                }
            )
        edge_list = []
        for node in order:
            for raw, tgt in self.edges[node]:
                edge_list.append(
                    {
                        "from": rank[node],
                        "to": rank[tgt],
                        "transition": sem.transition_name(self.model, raw).to_json(
                            self.model
                        ),
                    }
                )
        edge_list.sort(key=lambda e: (e["from"], e["to"], json.dumps(e["transition"], sort_keys=True)))
        return {
            "states": len(nodes),
            "transitions": sum(len(e) for e in self.edges),
            "nodes": nodes,
            "edges": edge_list,
        }


def successors_raw(eng, cfg: sem.Configuration):
    """All (raw transition, successor) pairs of a configuration."""
    return [
        (raw, sem.Configuration(*key)) for raw, key in succ_all(eng, cfg.key())
    ]


def explore(
    model: fm.FlatModel,
    limit_states: int = DEFAULT_STATE_LIMIT,
    workers: int = 1,
    store_edges: bool = True,
) -> LtsGraph:
    """Breadth-first closure of the transition relation.

    Raises LimitExceeded (with partial statistics) when the configuration
    count passes ``limit_states``.  ``workers > 1`` expands each frontier
    layer in a thread pool; the resulting graph is the same fixpoint.
    """
    eng = engine_for(model)
    init_key = sem.initial_configuration(model).key()
    keys = [init_key]
    index = {init_key: 0}
    edges: list[list[tuple[object, int]]] = [[]]
    frontier = deque([0])
    peak_frontier = 1
    n_transitions = 0
    deadlocks: list[int] = []

    def expand(node: int):
        return node, succ_all(eng, keys[node])

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while frontier:
            peak_frontier = max(peak_frontier, len(frontier))
            if pool is not None:
                layer = list(frontier)
                frontier.clear()
                results = pool.map(expand, layer)
            else:
                results = (expand(frontier.popleft()),)
            for node, succs in results:
                if not succs:
                    deadlocks.append(node)
                for raw, key in succs:
                    n_transitions += 1
                    tgt = index.get(key)
                    if tgt is None:
                        tgt = len(keys)
                        if tgt >= limit_states:
                            raise LimitExceeded(
                                [
                                    Diagnostic(
                                        "StateLimitExceeded",
                                        f"more than {limit_states} configurations",
                                    )
                                ],
                                stats={
                                    "states": len(keys),
                                    "transitions": n_transitions,
                                    "peak_frontier": peak_frontier,
                                },
                            )
                        index[key] = tgt
                        keys.append(key)
                        edges.append([])
                        frontier.append(tgt)
                    if store_edges:
                        edges[node].append((raw, tgt))
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    if deadlocks:
        cfg = sem.Configuration(*keys[deadlocks[0]])
        raise SemanticsError(
            [Diagnostic("Deadlock", "a configuration enables no transition at all")],
            configuration=cfg,
        )
    stats = {
        "states": len(keys),
        "transitions": n_transitions,
        "peak_frontier": peak_frontier,
    }
    return LtsGraph(model, keys, index, edges, stats)
