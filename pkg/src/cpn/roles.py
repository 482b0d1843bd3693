"""Topological roles of courses and top-N league tables."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .builder import Cpn
from .metrics import NodeMetrics

__all__ = ["MissingMetricsError", "Role", "RoleThresholds", "TableKey", "classify_roles", "top_table"]


class Role(str, enum.Enum):
    ISOLATED = "isolated"
    SOURCE = "source"
    SINK = "sink"
    HUB = "hub"
    BRIDGE = "bridge"
    INTERIOR = "interior"


class TableKey(str, enum.Enum):
    WEIGHTED_OUT_DEGREE = "weighted_out_degree"
    BETWEENNESS = "betweenness"


class MissingMetricsError(KeyError):
    pass


@dataclass(frozen=True)
class RoleThresholds:
    hub_top_n: int = 10
    bridge_top_n: int = 10

    def __post_init__(self):
        if self.hub_top_n < 1 or self.bridge_top_n < 1:
            raise ValueError("top-N thresholds must be positive")


def _top_with_ties(values: dict[int, float], n: int) -> set[int]:
    """Ids whose value reaches the n-th largest value. Zero never qualifies."""
    positive = sorted((v for v in values.values() if v > 0), reverse=True)
    if not positive:
        return set()
    cutoff = positive[min(n, len(positive)) - 1]
    return {k for k, v in values.items() if v >= cutoff and v > 0}


def classify_roles(cpn: Cpn, metrics: dict[int, NodeMetrics], thresholds: RoleThresholds | None = None) -> dict[int, frozenset[Role]]:
    """Assign a role set to every node.

    Hubs are the top ``hub_top_n`` by weighted out-degree, bridges the top
    ``bridge_top_n`` by betweenness among nodes that have one; nodes tied at
    the cutoff are all included. Roles other than ``isolated`` may combine.
    """
    thresholds = thresholds or RoleThresholds()
    missing = [v for v in cpn.node_ids() if v not in metrics]
    if missing:
        raise MissingMetricsError(f"no metrics for node ids {missing}")
    hubs = _top_with_ties({v: metrics[v].wk_out for v in cpn.node_ids()}, thresholds.hub_top_n)
    bridges = _top_with_ties(
        {v: metrics[v].betweenness for v in cpn.node_ids() if metrics[v].betweenness is not None},
        thresholds.bridge_top_n,
    )
    roles = {}
    for v in cpn.node_ids():
        m = metrics[v]
        if m.k == 0:
            roles[v] = frozenset({Role.ISOLATED})
            continue
        r = set()
        if m.k_in == 0:
            r.add(Role.SOURCE)
        if m.k_out == 0:
            r.add(Role.SINK)
        if v in hubs:
            r.add(Role.HUB)
        if v in bridges:
            r.add(Role.BRIDGE)
        roles[v] = frozenset(r or {Role.INTERIOR})
    return roles


def top_table(cpn: Cpn, metrics: dict[int, NodeMetrics], key, n: int, include_ties: bool = False) -> list[tuple[str, float]]:
    """League table of ``(label, value)`` sorted by value, then label.

    For betweenness only nodes carrying a score are eligible. With
    ``include_ties`` rows tied with the last one are kept beyond ``n``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    key = TableKey(key)
    rows = []
    for v in cpn.node_ids():
        m = metrics[v]
        value = m.wk_out if key is TableKey.WEIGHTED_OUT_DEGREE else m.betweenness
        if value is not None:
            rows.append((cpn.label(v), value))
    rows.sort(key=lambda r: (-r[1], r[0]))
    if len(rows) <= n:
        return rows
    cut = n
    if include_ties:
        while cut < len(rows) and rows[cut][1] == rows[n - 1][1]:
            cut += 1
    return rows[:cut]
