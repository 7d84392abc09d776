"""Product of the explored LTS with the tableau automaton, and the search
for a reachable strongly connected component that is Büchi-accepting and
satisfies every fairness obligation.

Justice and compassion are checked as SCC conditions (Streett style):
  * a Büchi acceptance set or justice witness lost by shrinking a component
    can never come back, so components failing those prune immediately;
  * a compassion obligation that is enabled somewhere in the component but
    never taken forces refinement: its enabled states are removed and the
    sub-components are re-examined.
"""

from __future__ import annotations

from array import array
from collections import deque
from dataclasses import dataclass, field

from ttmc.checker.atoms import AtomTable
from ttmc.checker.buchi import Tableau
from ttmc.checker.lasso import Lasso
from ttmc.diagnostics import Diagnostic, LimitExceeded, SemanticsError
from ttmc.elaborate import model as fm
from ttmc.lts import semantics as sem
from ttmc.lts.engine import engine_for, succ_all


class LtsCache:
    """Explored configuration graph with successor lists and atom bitmasks."""

    def __init__(self, model: fm.FlatModel, table: AtomTable,
                 limit_states: int):
        self.model = model
        self.table = table
        eng = engine_for(model)
        init_key = sem.initial_configuration(model).key()
        self.keys: list[tuple] = [init_key]
        self.index: dict[tuple, int] = {init_key: 0}
        self.succs: list[list[tuple[object, int]]] = []
        self.bits: list[int] = [table.evaluate(init_key)]
        frontier = deque([0])
        while frontier:
            node = frontier.popleft()
            while len(self.succs) <= node:
                self.succs.append([])
            out = []
            raw_succs = succ_all(eng, self.keys[node])
            if not raw_succs:
                raise SemanticsError(
                    [Diagnostic("Deadlock",
                                "a configuration enables no transition at all")],
                    configuration=self.config_at(node),
                )
            for raw, key in raw_succs:
                tgt = self.index.get(key)
                if tgt is None:
                    tgt = len(self.keys)
                    if tgt >= limit_states:
                        raise LimitExceeded(
                            [Diagnostic("StateLimitExceeded",
                                        f"more than {limit_states} configurations")],
                            stats={"states": len(self.keys)},
                        )
                    self.index[key] = tgt
                    self.keys.append(key)
                    self.bits.append(table.evaluate(key))
                    frontier.append(tgt)
                out.append((raw, tgt))
            self.succs[node] = out

    def config_at(self, node: int) -> sem.Configuration:
        return sem.Configuration(*self.keys[node])

    @property
    def n_states(self) -> int:
        return len(self.keys)

    @property
    def n_transitions(self) -> int:
        return sum(len(s) for s in self.succs)


@dataclass
class Product:
    cfg_of: array  # node -> config index
    tab_of: array  # node -> tableau state
    offsets: array  # CSR offsets into targets
    targets: array
    initials: list[int]

    @property
    def n_nodes(self) -> int:
        return len(self.cfg_of)

    def successors(self, node: int):
        return self.targets[self.offsets[node]:self.offsets[node + 1]]


def build_product(cache: LtsCache, tableau: Tableau,
                  limit_nodes: int) -> Product:
    index: dict[tuple[int, int], int] = {}
    cfg_of = array("q")
    tab_of = array("q")
    node_list: list[tuple[int, int]] = []

    def intern(ci: int, q: int) -> int:
        key = (ci, q)
        node = index.get(key)
        if node is None:
            node = len(node_list)
            if node >= limit_nodes:
                raise LimitExceeded(
                    [Diagnostic("StateLimitExceeded",
                                f"product exceeds {limit_nodes} nodes")],
                    stats={"product_states": len(node_list)},
                )
            index[key] = node
            node_list.append(key)
            cfg_of.append(ci)
            tab_of.append(q)
        return node

    initials = []
    for q in tableau.initial:
        if tableau.compatible(q, cache.bits[0]):
            initials.append(intern(0, q))

    offsets = array("q", [0])
    targets = array("q")
    done = 0
    while done < len(node_list):
        ci, q = node_list[done]
        for raw, cj in cache.succs[ci]:
            bits = cache.bits[cj]
            for q2 in tableau.successors[q]:
                if tableau.compatible(q2, bits):
                    targets.append(intern(cj, q2))
        offsets.append(len(targets))
        done += 1
    return Product(cfg_of, tab_of, offsets, targets, initials)


# ── SCC machinery ────────────────────────────────────────────────


def tarjan_sccs(product: Product, members: frozenset | None = None):
    """Iterative Tarjan; restricted to ``members`` when given.  Yields each
    SCC as a list of nodes."""
    n = product.n_nodes
    index = {}
    low = {}
    on_stack = set()
    stack: list[int] = []
    sccs = []
    counter = [0]

    def allowed(v: int) -> bool:
        return members is None or v in members

    nodes = members if members is not None else range(n)
    for root in nodes:
        if root in index or not allowed(root):
            continue
        work = [(root, iter(product.successors(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if not allowed(w):
                    continue
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(product.successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    if index[w] < low[v]:
                        low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def _nontrivial(product: Product, comp: list[int]) -> bool:
    if len(comp) > 1:
        return True
    v = comp[0]
    return any(w == v for w in product.successors(v))


@dataclass
class FairSccResult:
    nodes: frozenset
    justice_witness: dict
    compassion_witness: dict
    buchi_witness: dict


def find_fair_accepting_scc(product: Product, cache: LtsCache,
                            tableau: Tableau, obligations) -> frozenset | None:
    """The first (deterministically chosen) reachable SCC that intersects
    every Büchi acceptance set and admits a fair cycle."""
    en_bits = []
    taken_bits = []
    for ob in obligations:
        en_bits.append([ob.enabled_key(k) for k in cache.keys])
        taken_bits.append([ob.taken_key(k) for k in cache.keys])

    def examine(comp: list[int]):
        comp_set = frozenset(comp)
        for facc in tableau.acceptance:
            if not any(product.tab_of[v] in facc for v in comp):
                return None  # lost forever under refinement
        for k, ob in enumerate(obligations):
            if ob.kind != "justice":
                continue
            ok = any(
                taken_bits[k][product.cfg_of[v]] or not en_bits[k][product.cfg_of[v]]
                for v in comp
            )
            if not ok:
                return None
        bad = []
        for k, ob in enumerate(obligations):
            if ob.kind != "compassion":
                continue
            enabled_in = any(en_bits[k][product.cfg_of[v]] for v in comp)
            taken_in = any(taken_bits[k][product.cfg_of[v]] for v in comp)
            if enabled_in and not taken_in:
                bad.append(k)
        if not bad:
            return comp_set
        reduced = frozenset(
            v for v in comp
            if not any(en_bits[k][product.cfg_of[v]] for k in bad)
        )
        for sub in tarjan_sccs(product, reduced):
            if not _nontrivial(product, sub):
                continue
            found = examine(sub)
            if found is not None:
                return found
        return None

    for comp in sorted(tarjan_sccs(product), key=min):
        if not _nontrivial(product, comp):
            continue
        found = examine(sorted(comp))
        if found is not None:
            return found
    return None


# ── lasso extraction ─────────────────────────────────────────────


def _bfs_path(product: Product, sources: list[int], goal_set: set[int],
              members: frozenset | None = None) -> list[int] | None:
    """Shortest node path from any source into goal_set (source included)."""
    source_set = set(sources)
    for s in sources:
        if s in goal_set:
            return [s]
    parent: dict[int, int] = {}
    seen = set(sources)
    q = deque(sources)
    while q:
        v = q.popleft()
        for w in product.successors(v):
            if members is not None and w not in members:
                continue
            if w in seen:
                continue
            seen.add(w)
            parent[w] = v
            if w in goal_set:
                path = [w]
                while path[-1] not in source_set:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            q.append(w)
    return None


def extract_lasso(product: Product, cache: LtsCache, tableau: Tableau,
                  obligations, scc: frozenset) -> Lasso:
    """A concrete counterexample: shortest prefix into the component, then a
    cycle visiting one witness per acceptance set and per obligation."""
    comp = sorted(scc)
    witnesses: list[int] = []
    for facc in tableau.acceptance:
        witnesses.append(min(v for v in comp if product.tab_of[v] in facc))
    for ob in obligations:
        en = [v for v in comp if ob.enabled_key(cache.keys[product.cfg_of[v]])]
        taken = [v for v in comp if ob.taken_key(cache.keys[product.cfg_of[v]])]
        if ob.kind == "justice":
            not_en = [v for v in comp if v not in set(en)]
            witnesses.append(min(taken) if taken else min(not_en))
        else:
            if en:
                witnesses.append(min(taken))
    if not witnesses:
        witnesses = [comp[0]]
    seen = set()
    ordered = [w for w in witnesses if not (w in seen or seen.add(w))]

    prefix_nodes = _bfs_path(product, list(product.initials), {ordered[0]})
    assert prefix_nodes is not None, "SCC unreachable from initial states"

    # Chain the witnesses and close back on the first one; every segment has
    # at least one edge because it starts from the current node's successors.
    cycle_nodes: list[int] = [ordered[0]]
    cur = ordered[0]
    for w in ordered[1:] + [ordered[0]]:
        seg = _bfs_path(
            product,
            [v for v in product.successors(cur) if v in scc],
            {w},
            members=scc,
        )
        assert seg is not None, "witness unreachable inside the SCC"
        cycle_nodes.extend(seg)
        cur = w

    model = cache.model
    eng = engine_for(model)

    def steps_of(nodes: list[int]):
        out = []
        for a, b in zip(nodes, nodes[1:]):
            ca, cb = product.cfg_of[a], product.cfg_of[b]
            raw = next(r for r, tgt in cache.succs[ca] if tgt == cb)
            out.append(
                (sem.transition_name(model, raw), cache.config_at(cb))
            )
        return out

    return Lasso(
        init=cache.config_at(product.cfg_of[prefix_nodes[0]]),
        prefix=steps_of(prefix_nodes),
        cycle=steps_of(cycle_nodes),
    )
