"""Node and graph metrics for a CPN.

Conventions:

* degree counts are over arcs, weighted degree sums arc weights;
* density is ``2m / (n(n-1))``;
* betweenness is directed, unweighted, computed on the subgraph induced by
  one weakly connected component and normalised by ``(n-1)(n-2)``;
* path lengths are directed hop counts, averaged over reachable ordered pairs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .builder import Cpn

__all__ = [
    "ComponentSet",
    "DegenerateInputError",
    "NoReachablePairsError",
    "NodeMetrics",
    "PathMetrics",
    "ScopeSummary",
    "SpearmanResult",
    "SummaryReport",
    "betweenness",
    "degree_metrics",
    "density",
    "node_metrics",
    "path_metrics",
    "spearman",
    "summarize",
    "weakly_connected_components",
]


class NoReachablePairsError(ValueError):
    pass


class DegenerateInputError(ValueError):
    pass


@dataclass(frozen=True)
class NodeMetrics:
    node: int
    k_in: int = 0
    k_out: int = 0
    wk_in: float = 0.0
    wk_out: float = 0.0
    betweenness: float | None = None

    @property
    def k(self) -> int:
        return self.k_in + self.k_out

    @property
    def wk(self) -> float:
        return self.wk_in + self.wk_out


def degree_metrics(cpn: Cpn) -> dict[int, NodeMetrics]:
    k_in = dict.fromkeys(cpn.node_ids(), 0)
    k_out = dict(k_in)
    wk_in = dict.fromkeys(k_in, 0.0)
    wk_out = dict(wk_in)
    # arcs are stored sorted, so the summation order is fixed
    for a in cpn.arcs:
        k_out[a.source] += 1
        k_in[a.target] += 1
        wk_out[a.source] += a.weight
        wk_in[a.target] += a.weight
    return {v: NodeMetrics(v, k_in[v], k_out[v], wk_in[v], wk_out[v]) for v in k_in}


def _density(n, m):
    return 2.0 * m / (n * (n - 1)) if n >= 2 else 0.0


def density(cpn: Cpn) -> float:
    return _density(len(cpn.nodes), len(cpn.arcs))


@dataclass(frozen=True)
class ComponentSet:
    components: tuple[tuple[int, ...], ...] = ()

    @property
    def largest(self) -> tuple[int, ...]:
        return self.components[0] if self.components else ()

    def sizes(self) -> list[int]:
        return [len(c) for c in self.components]

    def __len__(self):
        return len(self.components)


def weakly_connected_components(cpn: Cpn) -> ComponentSet:
    """Components ignoring direction, found by iterative depth-first search.

    Sorted by descending size, then by smallest member id; members ascending.
    """
    seen = set()
    comps = []
    for root in cpn.node_ids():
        if root in seen:
            continue
        seen.add(root)
        stack = [root]
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in cpn.successors[v] + cpn.predecessors[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(tuple(sorted(comp)))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return ComponentSet(tuple(comps))


def _induced_successors(cpn, nodes):
    members = set(nodes)
    return {v: [w for w in cpn.successors[v] if w in members] for v in sorted(members)}


def betweenness(cpn: Cpn, nodes, normalized: bool = True) -> dict[int, float]:
    """Brandes accumulation over the subgraph induced by ``nodes``.

    Sources and successor lists are visited in ascending id order, so the
    floating-point result does not depend on anything but the graph. With
    fewer than three nodes every score is zero.
    """
    adj = _induced_successors(cpn, nodes)
    n = len(adj)
    scores = dict.fromkeys(adj, 0.0)
    if n < 3:
        return scores
    for s in adj:
        order = []
        preds = {s: []}
        sigma = {s: 1}
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    sigma[w] = 0
                    preds[w] = []
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = dict.fromkeys(order, 0.0)
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                scores[w] += delta[w]
    if normalized:
        scale = 1.0 / ((n - 1) * (n - 2))
        scores = {v: b * scale for v, b in scores.items()}
    return scores


class PathMetrics(NamedTuple):
    diameter: int
    characteristic_path_length: float
    reachable_pairs: int


def path_metrics(cpn: Cpn, nodes) -> PathMetrics:
    """Directed BFS distances inside the induced subgraph.

    Only ordered pairs joined by a directed path count. Raises
    :class:`NoReachablePairsError` when there are none.
    """
    adj = _induced_successors(cpn, nodes)
    total = 0
    pairs = 0
    diameter = 0
    for s in adj:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        for t, d in dist.items():
            if t != s:
                total += d
                pairs += 1
                diameter = max(diameter, d)
    if not pairs:
        raise NoReachablePairsError("no ordered pair of nodes is joined by a directed path")
    return PathMetrics(diameter, total / pairs, pairs)


def node_metrics(cpn: Cpn, components: ComponentSet | None = None) -> dict[int, NodeMetrics]:
    """Degree metrics for every node plus betweenness for the largest component."""
    if components is None:
        components = weakly_connected_components(cpn)
    metrics = degree_metrics(cpn)
    bc = betweenness(cpn, components.largest)
    for v, b in bc.items():
        m = metrics[v]
        metrics[v] = NodeMetrics(m.node, m.k_in, m.k_out, m.wk_in, m.wk_out, b)
    return metrics


# ---------------------------------------------------------------- spearman


class SpearmanResult(NamedTuple):
    rho: float
    p: float


def _average_ranks(values):
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys, permutations: int = 10_000, seed: int = 0) -> SpearmanResult:
    """Spearman's rho with a two-sided Monte Carlo permutation p-value.

    Ties get average ranks. ``p = (1 + #{|rho_perm| >= |rho|}) / (1 + permutations)``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("spearman needs two sequences of equal length")
    if len(xs) < 3:
        raise ValueError("spearman needs at least three observations")
    if np.all(xs == xs[0]) or np.all(ys == ys[0]):
        raise DegenerateInputError("rank correlation is undefined for a constant sequence")
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    denom = np.sqrt((rx @ rx) * (ry @ ry))
    rho = float(np.clip((rx @ ry) / denom, -1.0, 1.0))
    if permutations <= 0:
        return SpearmanResult(rho, float("nan"))
    rng = np.random.default_rng(seed)
    shuffled = rng.permuted(np.tile(ry, (permutations, 1)), axis=1)
    perm_rho = (shuffled @ rx) / denom
    hits = int(np.count_nonzero(np.abs(perm_rho) >= abs(rho) - 1e-12))
    return SpearmanResult(rho, (hits + 1) / (permutations + 1))


# ----------------------------------------------------------------- summary


@dataclass(frozen=True)
class ScopeSummary:
    nodes: int = 0
    arcs: int = 0
    density: float = 0.0
    components: int = 0
    mean_degree: float = 0.0
    mean_in_degree: float = 0.0
    mean_out_degree: float = 0.0
    mean_weighted_degree: float = 0.0
    mean_weighted_in_degree: float = 0.0
    mean_weighted_out_degree: float = 0.0
    diameter: int | None = None
    characteristic_path_length: float | None = None
    mean_betweenness: float | None = None

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SummaryReport:
    full: ScopeSummary
    largest_component: ScopeSummary

    def to_dict(self):
        return {"full": self.full.to_dict(), "largest_component": self.largest_component.to_dict()}


def _scope(cpn, nodes, n_components):
    members = set(nodes)
    n = len(members)
    arcs = [a for a in cpn.arcs if a.source in members and a.target in members]
    m = len(arcs)
    w = sum(a.weight for a in arcs)
    if not n:
        return ScopeSummary()
    return ScopeSummary(
        nodes=n,
        arcs=m,
        density=_density(n, m),
        components=n_components,
        mean_degree=2.0 * m / n,
        mean_in_degree=m / n,
        mean_out_degree=m / n,
        mean_weighted_degree=2.0 * w / n,
        mean_weighted_in_degree=w / n,
        mean_weighted_out_degree=w / n,
    )


def summarize(cpn: Cpn, metrics: dict[int, NodeMetrics] | None = None, components: ComponentSet | None = None) -> SummaryReport:
    """Table-style summary for the whole graph and its largest component.

    Path and betweenness figures are only filled for the largest component;
    they stay ``None`` when it has no reachable pair.
    """
    if components is None:
        components = weakly_connected_components(cpn)
    if metrics is None:
        metrics = node_metrics(cpn, components)
    full = _scope(cpn, cpn.node_ids(), len(components))
    largest = components.largest
    lcc = _scope(cpn, largest, 1 if largest else 0)
    if largest:
        try:
            pm = path_metrics(cpn, largest)
            diameter, cpl = pm.diameter, pm.characteristic_path_length
        except NoReachablePairsError:
            diameter = cpl = None
        bc = [metrics[v].betweenness for v in largest]
        mean_bc = float(np.mean(bc)) if all(b is not None for b in bc) else None
        lcc = ScopeSummary(**{**lcc.to_dict(), "diameter": diameter,
                              "characteristic_path_length": cpl, "mean_betweenness": mean_bc})
    return SummaryReport(full, lcc)
