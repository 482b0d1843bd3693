"""Cycle enumeration, DAG checks and the lecture/lab repair."""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import replace

from .builder import BuildDiagnostics, BuildPolicy, Cpn, Provenance

__all__ = [
    "CycleLimitError",
    "NotADagError",
    "detect_cycles",
    "enforce_dag",
    "find_cycle",
    "is_dag",
    "topological_order",
]

DEFAULT_MAX_CYCLES = 100_000


class CycleLimitError(RuntimeError):
    def __init__(self, cap):
        super().__init__(f"more than {cap} elementary cycles; raise the cap to enumerate them")
        self.cap = cap


class NotADagError(ValueError):
    def __init__(self, cycle, labels=None):
        shown = " -> ".join(labels or map(str, cycle))
        super().__init__(f"graph is not a DAG; cycle: {shown}")
        self.cycle = tuple(cycle)


def _sccs(nodes, adj):
    """Tarjan's strongly connected components, iterative."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    out = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def _circuits(start, adj):
    """Johnson's circuit search rooted at ``start`` inside one component."""
    blocked = {start}
    blocked_by = defaultdict(set)
    path = [start]
    stack = [iter(adj[start])]
    closed = [False]

    def unblock(node):
        pending = [node]
        while pending:
            u = pending.pop()
            if u in blocked:
                blocked.discard(u)
                pending.extend(blocked_by[u])
                blocked_by[u].clear()

    while stack:
        for w in stack[-1]:
            if w == start:
                yield list(path)
                closed[-1] = True
            elif w not in blocked:
                path.append(w)
                closed.append(False)
                stack.append(iter(adj[w]))
                blocked.add(w)
                break
        else:
            stack.pop()
            v = path.pop()
            if closed.pop():
                if closed:
                    closed[-1] = True
                unblock(v)
            else:
                for w in adj[v]:
                    blocked_by[w].add(v)


def detect_cycles(cpn: Cpn, max_cycles: int = DEFAULT_MAX_CYCLES) -> list[tuple[int, ...]]:
    """Every elementary directed cycle, each once.

    A cycle is reported starting from its smallest node id and the list is
    sorted lexicographically. Raises :class:`CycleLimitError` once more than
    ``max_cycles`` cycles have been found.
    """
    succ = cpn.successors
    cycles = []
    # only nodes inside a nontrivial SCC can sit on a cycle (no self-loops exist)
    candidates = sorted(
        v for comp in _sccs(cpn.node_ids(), succ) if len(comp) > 1 for v in comp
    )
    remaining = set(candidates)
    for s in candidates:
        sub = {v: [w for w in succ[v] if w in remaining] for v in remaining}
        comp = next(c for c in _sccs([s], sub) if s in c)
        if len(comp) > 1:
            members = set(comp)
            local = {v: [w for w in sub[v] if w in members] for v in comp}
            for cyc in _circuits(s, local):
                cycles.append(tuple(cyc))
                if len(cycles) > max_cycles:
                    raise CycleLimitError(max_cycles)
        remaining.discard(s)
    cycles.sort()
    return cycles


def _kahn(cpn):
    indeg = {v: len(p) for v, p in cpn.predecessors.items()}
    heap = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in cpn.successors[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    return order, indeg


def is_dag(cpn: Cpn) -> bool:
    order, _ = _kahn(cpn)
    return len(order) == len(cpn.nodes)


def find_cycle(cpn: Cpn):
    """One directed cycle (starting at its smallest id), or None for a DAG."""
    order, indeg = _kahn(cpn)
    if len(order) == len(cpn.nodes):
        return None
    # every leftover node has a leftover predecessor; walk back until a repeat
    left = {v for v, d in indeg.items() if d > 0}
    v = min(left)
    seen = {}
    walk = []
    while v not in seen:
        seen[v] = len(walk)
        walk.append(v)
        v = next(p for p in cpn.predecessors[v] if p in left)
    cyc = walk[seen[v]:][::-1]
    i = cyc.index(min(cyc))
    return tuple(cyc[i:] + cyc[:i])


def topological_order(cpn: Cpn) -> list[int]:
    """Kahn's order with ties broken by ascending node id."""
    order, _ = _kahn(cpn)
    if len(order) != len(cpn.nodes):
        cyc = find_cycle(cpn)
        raise NotADagError(cyc, [cpn.label(v) for v in cyc])
    return order


def enforce_dag(
    cpn: Cpn,
    policy: BuildPolicy | None = None,
    diagnostics: BuildDiagnostics | None = None,
    max_cycles: int = DEFAULT_MAX_CYCLES,
):
    """Drop lab -> lecture arcs from corequisite 2-cycles.

    A 2-cycle qualifies when at least one of its arcs is a corequisite arc
    and exactly one endpoint has a lab title. The lab -> lecture arc is only
    removed if it is itself a corequisite arc. Whatever cycles remain are
    listed in ``unresolved_cycles``. ``diagnostics`` from the build, when
    given, are carried over into the result.
    """
    policy = policy or BuildPolicy()
    removed = []
    for arc in cpn.arcs:
        back = cpn.arc(arc.target, arc.source)
        if back is None:
            continue
        if Provenance.COREQUISITE not in (arc.provenance, back.provenance):
            continue
        src_lab = policy.is_lab(cpn.node_by_id[arc.source].title)
        dst_lab = policy.is_lab(cpn.node_by_id[arc.target].title)
        if src_lab and not dst_lab and arc.provenance is Provenance.COREQUISITE:
            removed.append(arc)
    repaired = cpn.without_arcs(removed) if removed else cpn
    cycles = detect_cycles(repaired, max_cycles) if not is_dag(repaired) else []
    diags = replace(
        diagnostics or BuildDiagnostics(),
        removed_arcs=tuple(removed),
        unresolved_cycles=tuple(cycles),
    )
    return repaired, diags
