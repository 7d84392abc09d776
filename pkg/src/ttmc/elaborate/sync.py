"""Action compilation: per-variable projections via the action graph.

Every event action (synchronized or not) is compiled to an ordered list of
variable projections.  The action graph has one vertex per assigned
variable (an array counts as one vertex) and an edge v1 -> v2 whenever the
computation of v1's new value references v2 primed.  Unprimed references
read an immutable pre-state snapshot and contribute no edges, which makes
every topological order produce the same post-state.

Static rejection rules:
  * two writes to the same scalar from different member events, or from
    non-exclusive branches of one event, are a DoubleAssignment;
  * array writes merge into one projection; two sites with structurally
    equal element expressions that can fire together are a
    DoubleAssignment (unequal expressions are checked at execution time);
  * a cycle in the action graph is a CircularDataFlow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ttmc.diagnostics import NO_POS, Diagnostic, Pos
from ttmc.elaborate.model import Projection, QueueEffect, WriteSite
from ttmc.syntax import ast


@dataclass
class MemberAction:
    """One event's contribution to a (possibly compound) action."""

    member_id: str
    stmts: tuple[ast.Stmt, ...]


@dataclass
class _RawSite:
    member: str
    seq: int  # declaration order across members
    var: str
    is_array_elem: bool
    index: ast.Expr | None
    value: ast.Expr | None
    demonic: tuple | None
    demonic_array: bool
    path: tuple[tuple[int, int], ...]  # (if-node id, branch index)
    cond: ast.Expr | None
    pos: Pos


@dataclass
class CompiledAction:
    projections: tuple[Projection, ...]
    queue_effects: tuple[QueueEffect, ...]
    graph: dict[str, set[str]]  # var -> primed dependencies
    diagnostics: list[Diagnostic] = field(default_factory=list)


def primed_refs(e: ast.Expr | None):
    """Names referenced primed anywhere inside an expression."""
    yield from _refs(e, primed_only=True)


def all_refs(e: ast.Expr | None):
    yield from _refs(e, primed_only=False)


def _refs(e: ast.Expr | None, primed_only: bool):
    if e is None:
        return
    if isinstance(e, ast.PrimedName):
        yield e.name
    elif isinstance(e, ast.Name):
        if not primed_only:
            yield e.name
    elif isinstance(e, ast.Unary):
        yield from _refs(e.operand, primed_only)
    elif isinstance(e, ast.Binary):
        yield from _refs(e.lhs, primed_only)
        yield from _refs(e.rhs, primed_only)
    elif isinstance(e, ast.IndexExpr):
        yield from _refs(e.base, primed_only)
        yield from _refs(e.index, primed_only)
    elif isinstance(e, ast.Fold):
        yield from _refs(e.body, primed_only)
    elif isinstance(e, ast.Call):
        for a in e.args:
            yield from _refs(a, primed_only)


def _conj(a: ast.Expr | None, b: ast.Expr | None) -> ast.Expr | None:
    if a is None:
        return b
    if b is None:
        return a
    return ast.Binary("&&", a, b)


def _negate(e: ast.Expr) -> ast.Expr:
    return ast.Unary("!", e)


class _Collector:
    def __init__(self, resolve_domain, diagnostics: list[Diagnostic]):
        self.sites: list[_RawSite] = []
        self.queue_ops: list[tuple[str, QueueEffect]] = []  # (member, effect)
        self.resolve_domain = resolve_domain
        self.diagnostics = diagnostics
        self._node_counter = 0
        self._seq = 0

    def collect(self, member: str, stmts, path=(), cond=None):
        for s in stmts:
            if isinstance(s, ast.SkipStmt):
                continue
            if isinstance(s, ast.IfStmt):
                self._node_counter += 1
                node = self._node_counter
                not_prior: ast.Expr | None = None
                for bi, (bcond, body) in enumerate(s.branches):
                    branch_cond = _conj(cond, _conj(not_prior, bcond))
                    self.collect(member, body, path + ((node, bi),), branch_cond)
                    not_prior = _conj(not_prior, _negate(bcond))
                if s.orelse:
                    self.collect(
                        member,
                        s.orelse,
                        path + ((node, len(s.branches)),),
                        _conj(cond, not_prior),
                    )
                continue
            if isinstance(s, ast.QueueStmt):
                self.queue_ops.append(
                    (member, QueueEffect(s.target, s.op, cond, s.arg, pos=s.pos))
                )
                continue
            if isinstance(s, (ast.Assign, ast.DemonicAssign)):
                target = s.target
                index = None
                if isinstance(target, ast.IndexExpr):
                    index = target.index
                    target = target.base
                if not isinstance(target, ast.Name):
                    self.diagnostics.append(
                        Diagnostic("SyntaxError", "invalid assignment target", s.pos)
                    )
                    continue
                value = demonic = None
                demonic_array = False
                if isinstance(s, ast.Assign):
                    value = s.value
                else:
                    demonic = self.resolve_domain(s.choice, s.pos)
                    demonic_array = s.choice.array
                    if demonic is not None and len(demonic) == 0:
                        self.diagnostics.append(
                            Diagnostic(
                                "SyntaxError",
                                "demonic assignment domain is empty",
                                s.pos,
                            )
                        )
                        continue
                self._seq += 1
                self.sites.append(
                    _RawSite(
                        member, self._seq, target.name,
                        index is not None, index, value, demonic, demonic_array,
                        path, cond, s.pos,
                    )
                )
                continue
            raise TypeError(f"unknown statement {s!r}")


def _exclusive(a: _RawSite, b: _RawSite) -> bool:
    if a.member != b.member:
        return False
    for (na, ba), (nb, bb) in zip(a.path, b.path):
        if na != nb:
            return False
        if ba != bb:
            return True
    return False


def compile_action(
    members: list[MemberAction],
    resolve_domain,
    is_array_var,
    is_queue_var,
    compound: bool = False,
    strict_edges: bool = False,
) -> CompiledAction:
    """Build the ordered projection list for one (possibly compound) action.

    ``resolve_domain(choice, pos) -> tuple`` resolves a demonic draw domain
    to its static value tuple; ``is_array_var(name)`` / ``is_queue_var(name)``
    classify targets.  ``strict_edges`` additionally adds action-graph edges
    for unprimed right-hand-side references (anti-dependencies), which the
    snapshot evaluation makes order-irrelevant; it only affects cycle
    reporting and projection order, never the computed post-state.
    """
    diagnostics: list[Diagnostic] = []
    collector = _Collector(resolve_domain, diagnostics)
    for m in members:
        collector.collect(m.member_id, m.stmts)

    by_var: dict[str, list[_RawSite]] = {}
    for site in collector.sites:
        if is_queue_var(site.var):
            diagnostics.append(
                Diagnostic(
                    "SyntaxError",
                    f"queue variable {site.var!r} can only be changed with "
                    "Enqueue/Dequeue",
                    site.pos,
                )
            )
            continue
        if site.is_array_elem and not is_array_var(site.var):
            diagnostics.append(
                Diagnostic(
                    "SyntaxError",
                    f"{site.var!r} is not an array",
                    site.pos,
                )
            )
            continue
        by_var.setdefault(site.var, []).append(site)

    # Static double-write detection.
    for var, sites in by_var.items():
        whole_array = is_array_var(var)
        for i in range(len(sites)):
            for j in range(i + 1, len(sites)):
                a, b = sites[i], sites[j]
                if _exclusive(a, b):
                    continue
                if whole_array and a.index is not None and b.index is not None:
                    if a.index != b.index:
                        continue  # distinct element expressions: runtime check
                    what = f"element {_pp(a.index)} of {var!r}"
                elif whole_array and (a.index is None or b.index is None):
                    what = f"array {var!r}"
                else:
                    what = f"variable {var!r}"
                detail = (
                    "two synchronized events" if a.member != b.member
                    else "the event"
                )
                diagnostics.append(
                    Diagnostic(
                        "DoubleAssignment",
                        f"{detail} assign multiple values to {what} "
                        f"(also written at {a.pos})",
                        b.pos,
                    )
                )

    for _, q in collector.queue_ops:
        if not is_queue_var(q.var):
            diagnostics.append(
                Diagnostic("SyntaxError", f"{q.var!r} is not a queue", q.pos)
            )
    queue_vars: dict[str, list[QueueEffect]] = {}
    queue_owners: dict[str, set[str]] = {}
    for owner, q in collector.queue_ops:
        queue_vars.setdefault(q.var, []).append(q)
        queue_owners.setdefault(q.var, set()).add(owner)
    for var, ops in queue_vars.items():
        if len(queue_owners[var]) > 1:
            diagnostics.append(
                Diagnostic(
                    "DoubleAssignment",
                    f"two synchronized events mutate the same queue {var!r}",
                    ops[-1].pos,
                )
            )

    # Action graph over assigned variables; primed reads of unassigned
    # variables resolve to the (unchanged) pre-state value and add no edge.
    refs_of = all_refs if strict_edges else primed_refs
    assigned = set(by_var) | set(queue_vars)
    graph: dict[str, set[str]] = {v: set() for v in assigned}
    site_pos: dict[str, Pos] = {}
    for var, sites in by_var.items():
        site_pos[var] = sites[0].pos
        for site in sites:
            for expr in (site.cond, site.index, site.value):
                for ref in refs_of(expr):
                    if ref in assigned and ref != var:
                        graph[var].add(ref)
    for var, ops in queue_vars.items():
        site_pos.setdefault(var, ops[0].pos)
        for op in ops:
            for expr in (op.cond, op.arg):
                for ref in refs_of(expr):
                    if ref in assigned and ref != var:
                        graph[var].add(ref)

    order, cycle = _toposort(graph, {v: min(s.seq for s in by_var.get(v, [])) if v in by_var else 10**9 for v in assigned})
    if cycle:
        chain = " -> ".join(cycle + [cycle[0]])
        diagnostics.append(
            Diagnostic(
                "CircularDataFlow",
                f"circular primed data flow between synchronized actions: {chain}",
                site_pos.get(cycle[0], NO_POS),
            )
        )
        order = sorted(assigned)

    projections = tuple(
        Projection(
            var,
            tuple(
                WriteSite(
                    s.cond, s.index, s.value, s.demonic, s.demonic_array, pos=s.pos
                )
                for s in sorted(by_var[var], key=lambda s: s.seq)
            ),
        )
        for var in order
        if var in by_var
    )
    effects = tuple(q for _, q in collector.queue_ops)
    return CompiledAction(projections, effects, graph, diagnostics)


def _toposort(graph: dict[str, set[str]], ordinal: dict[str, int]):
    """Dependencies-first order; deterministic via declaration ordinals.
    Returns (order, cycle) where cycle is a witness list when one exists."""
    indegree = {v: 0 for v in graph}
    dependents: dict[str, list[str]] = {v: [] for v in graph}
    for v, deps in graph.items():
        indegree[v] = len(deps)
        for d in deps:
            dependents[d].append(v)
    ready = sorted((v for v, d in indegree.items() if d == 0), key=lambda v: ordinal[v])
    order: list[str] = []
    import heapq

    heap = [(ordinal[v], v) for v in ready]
    heapq.heapify(heap)
    while heap:
        _, v = heapq.heappop(heap)
        order.append(v)
        for w in dependents[v]:
            indegree[w] -= 1
            if indegree[w] == 0:
                heapq.heappush(heap, (ordinal[w], w))
    if len(order) == len(graph):
        return order, None
    remaining = {v for v in graph if v not in set(order)}
    cycle = _find_cycle(graph, remaining)
    return order, cycle


def _find_cycle(graph: dict[str, set[str]], remaining: set[str]) -> list[str]:
    start = sorted(remaining)[0]
    seen: list[str] = []
    v = start
    while v not in seen:
        seen.append(v)
        v = sorted(d for d in graph[v] if d in remaining)[0]
    return seen[seen.index(v):]


def _pp(e: ast.Expr) -> str:
    from ttmc.syntax.pretty import pretty_expr

    return pretty_expr(e)


def resolve_sync(sync_members, resolve_domain, is_array_var, is_queue_var):
    """Merge member events of one synchronous set into a single compound
    action; see :func:`compile_action` for the rules."""
    return compile_action(
        sync_members, resolve_domain, is_array_var, is_queue_var, compound=True
    )
