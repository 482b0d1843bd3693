"""Turn a catalogue into a curriculum prerequisite network.

Arcs always point from prerequisite to dependent course. An OR group of
``m`` alternatives contributes ``1/m`` along each of its arcs; contributions
that land on the same ordered node pair are summed and clamped to 1.0.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, replace
from functools import cached_property

from .model import Catalog, CoreqDecl, CoreqMode, CourseCode, CourseRecord, RequirementClause, as_code

__all__ = [
    "BuildDiagnostics",
    "BuildPolicy",
    "CoreqBuildMode",
    "Cpn",
    "CpnArc",
    "CpnNode",
    "DanglingMode",
    "DanglingReferenceError",
    "Provenance",
    "UnresolvedCorequisiteError",
    "build_cpn",
    "resolve_cross_listings",
]


class Provenance(str, enum.Enum):
    PREREQUISITE = "prerequisite"
    COREQUISITE = "corequisite"


class CoreqBuildMode(str, enum.Enum):
    BIDIRECTIONAL = "bidirectional"
    DIRECTED = "directed"


class DanglingMode(str, enum.Enum):
    CREATE_STUB = "create_stub"
    DROP = "drop"
    ERROR = "error"


class DanglingReferenceError(LookupError):
    def __init__(self, course, ref):
        super().__init__(f"{course} references unknown course {ref}")
        self.course = course
        self.ref = ref


class UnresolvedCorequisiteError(ValueError):
    def __init__(self, a, b, detail):
        super().__init__(f"cannot orient corequisite pair {a} / {b}: {detail}")
        self.pair = (a, b)


@dataclass(frozen=True)
class CpnNode:
    id: int
    member_codes: tuple[CourseCode, ...]
    title: str = ""
    stub: bool = False

    def __post_init__(self):
        members = tuple(sorted(set(self.member_codes)))
        if not members:
            raise ValueError("a node needs at least one course code")
        object.__setattr__(self, "member_codes", members)

    @property
    def label(self) -> str:
        return "/".join(str(c) for c in self.member_codes)


@dataclass(frozen=True)
class CpnArc:
    source: int
    target: int
    weight: float = 1.0
    provenance: Provenance = Provenance.PREREQUISITE

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError(f"self-loop on node {self.source}")
        if not 0.0 < self.weight <= 1.0:
            raise ValueError(f"arc weight {self.weight} outside (0, 1]")

    @property
    def pair(self):
        return (self.source, self.target)


@dataclass(frozen=True)
class Cpn:
    """Immutable directed weighted graph. Nodes sorted by id, arcs by (source, target)."""

    nodes: tuple[CpnNode, ...] = ()
    arcs: tuple[CpnArc, ...] = ()

    def __post_init__(self):
        nodes = tuple(sorted(self.nodes, key=lambda n: n.id))
        arcs = tuple(sorted(self.arcs, key=lambda a: a.pair))
        ids = [n.id for n in nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node id")
        idset = set(ids)
        seen_pairs = set()
        for a in arcs:
            if a.source not in idset or a.target not in idset:
                raise ValueError(f"arc {a.source}->{a.target} has an unknown endpoint")
            if a.pair in seen_pairs:
                raise ValueError(f"parallel arc {a.source}->{a.target}")
            seen_pairs.add(a.pair)
        owners = {}
        for n in nodes:
            for c in n.member_codes:
                if c in owners:
                    raise ValueError(f"{c} belongs to nodes {owners[c]} and {n.id}")
                owners[c] = n.id
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "arcs", arcs)

    @cached_property
    def code_index(self) -> dict[CourseCode, int]:
        return {c: n.id for n in self.nodes for c in n.member_codes}

    @cached_property
    def node_by_id(self) -> dict[int, CpnNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def successors(self) -> dict[int, list[int]]:
        out = {n.id: [] for n in self.nodes}
        for a in self.arcs:
            out[a.source].append(a.target)
        return out

    @cached_property
    def predecessors(self) -> dict[int, list[int]]:
        out = {n.id: [] for n in self.nodes}
        for a in self.arcs:
            out[a.target].append(a.source)
        for v in out.values():
            v.sort()
        return out

    @cached_property
    def arc_index(self) -> dict[tuple[int, int], CpnArc]:
        return {a.pair: a for a in self.arcs}

    def node_ids(self) -> list[int]:
        return [n.id for n in self.nodes]

    def label(self, node_id: int) -> str:
        return self.node_by_id[node_id].label

    def node_for(self, code) -> CpnNode:
        return self.node_by_id[self.code_index[as_code(code)]]

    def arc(self, source, target):
        return self.arc_index.get((source, target))

    def without_arcs(self, arcs) -> Cpn:
        drop = {a.pair for a in arcs}
        return Cpn(self.nodes, tuple(a for a in self.arcs if a.pair not in drop))

    def with_arcs(self, arcs) -> Cpn:
        return Cpn(self.nodes, self.arcs + tuple(arcs))

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class BuildPolicy:
    coreq_mode: CoreqBuildMode = CoreqBuildMode.DIRECTED
    dangling_mode: DanglingMode = DanglingMode.CREATE_STUB
    lab_title_markers: tuple[str, ...] = ("lab", "laboratory")

    def __post_init__(self):
        object.__setattr__(self, "coreq_mode", CoreqBuildMode(self.coreq_mode))
        object.__setattr__(self, "dangling_mode", DanglingMode(self.dangling_mode))
        markers = tuple(m.lower() for m in self.lab_title_markers if m)
        if self.coreq_mode is CoreqBuildMode.DIRECTED and not markers:
            raise ValueError("directed corequisite mode needs at least one lab title marker")
        object.__setattr__(self, "lab_title_markers", markers)

    def is_lab(self, title: str) -> bool:
        t = title.lower()
        return any(m in t for m in self.lab_title_markers)


@dataclass(frozen=True)
class BuildDiagnostics:
    merged_groups: tuple[tuple[CourseCode, ...], ...] = ()
    dangling_codes: tuple[CourseCode, ...] = ()
    stub_nodes: tuple[int, ...] = ()
    removed_arcs: tuple[CpnArc, ...] = ()
    unresolved_cycles: tuple[tuple[int, ...], ...] = ()
    # would-be self loops created by merging, as (course, referenced code)
    self_loops: tuple[tuple[CourseCode, CourseCode], ...] = ()


# ------------------------------------------------------------ cross-listing


class _DisjointSet:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller code becomes the root so the canonical code is stable
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _dedupe(items):
    out = []
    for x in items:
        if x not in out:
            out.append(x)
    return tuple(out)


def resolve_cross_listings(catalog: Catalog):
    """Merge cross-listed records into one record per equivalence group.

    Cross-listing is closed transitively. Each merged record takes the
    smallest member code, lists the other members as cross-listings, and
    carries the union of its members' clauses, corequisites and soft rules.
    Returns ``(merged catalog, {member code: sorted group})``; only codes in
    groups of two or more appear in the map.
    """
    ds = _DisjointSet()
    for rec in catalog.records:
        ds.find(rec.code)
        for other in rec.cross_listings:
            ds.union(rec.code, other)

    groups = defaultdict(list)
    for code in list(ds.parent):
        groups[ds.find(code)].append(code)
    merge_map = {}
    for members in groups.values():
        if len(members) > 1:
            group = tuple(sorted(members))
            for c in members:
                merge_map[c] = group

    by_root = defaultdict(list)
    for rec in catalog.records:
        by_root[ds.find(rec.code)].append(rec)

    out = []
    emitted = set()
    for rec in catalog.records:
        root = ds.find(rec.code)
        if root in emitted:
            continue
        emitted.add(root)
        members = by_root[root]
        group = merge_map.get(rec.code, (rec.code,))
        if len(group) == 1:
            out.append(rec)
            continue
        titles = _dedupe(r.title for r in members if r.title)
        conjuncts = _dedupe(g for r in members for g in r.prerequisites.conjuncts)
        coreqs = _dedupe(d for r in members for d in r.corequisites)
        soft = _dedupe(s for r in members for s in r.soft_rules)
        out.append(
            CourseRecord(
                code=group[0],
                title=" / ".join(titles),
                prerequisites=RequirementClause(conjuncts),
                corequisites=coreqs,
                cross_listings=group[1:],
                soft_rules=soft,
            )
        )
    return replace(catalog, records=tuple(out)), merge_map


# ------------------------------------------------------------------ build


class _Builder:
    def __init__(self, catalog, policy):
        self.policy = policy
        self.catalog, self.merge_map = resolve_cross_listings(catalog)
        self.nodes = []
        self.index = {}
        self.dangling = []
        self.stubs = []
        self.self_loops = []
        # (source, target) -> [weight sum, provenances]
        self.contrib = {}

    def add_node(self, codes, title, stub=False):
        node = CpnNode(len(self.nodes), tuple(codes), title, stub)
        self.nodes.append(node)
        for c in node.member_codes:
            self.index[c] = node.id
        return node.id

    def resolve(self, owner, code):
        if code in self.index:
            return self.index[code]
        mode = self.policy.dangling_mode
        if mode is DanglingMode.ERROR:
            raise DanglingReferenceError(owner, code)
        if code not in self.dangling:
            self.dangling.append(code)
        if mode is DanglingMode.DROP:
            return None
        node_id = self.add_node(self.merge_map.get(code, (code,)), "", stub=True)
        self.stubs.append(node_id)
        return node_id

    def contribute(self, owner, code, source, target, weight, provenance):
        if source is None or target is None:
            return
        if source == target:
            self.self_loops.append((owner, code))
            return
        slot = self.contrib.setdefault((source, target), [0.0, set()])
        slot[0] += weight
        slot[1].add(provenance)

    def title(self, node_id):
        return self.nodes[node_id].title

    def add_coreq(self, rec, me, decl: CoreqDecl):
        other = self.resolve(rec.code, decl.target)
        if other is None:
            return
        if self.policy.coreq_mode is CoreqBuildMode.BIDIRECTIONAL:
            if decl.mode is CoreqMode.HARD:
                self.contribute(rec.code, decl.target, me, other, 1.0, Provenance.COREQUISITE)
                self.contribute(rec.code, decl.target, other, me, 1.0, Provenance.COREQUISITE)
            else:
                # credit-or-coregistration: the named course may come first
                self.contribute(rec.code, decl.target, other, me, 1.0, Provenance.COREQUISITE)
            return
        if other == me:
            self.self_loops.append((rec.code, decl.target))
            return
        my_lab = self.policy.is_lab(self.title(me))
        other_lab = self.policy.is_lab(self.title(other))
        if my_lab == other_lab:
            detail = "both titles look like labs" if my_lab else "neither title looks like a lab"
            raise UnresolvedCorequisiteError(rec.code, decl.target, detail)
        lecture, lab = (other, me) if my_lab else (me, other)
        self.contribute(rec.code, decl.target, lecture, lab, 1.0, Provenance.COREQUISITE)

    def run(self):
        for rec in self.catalog.records:
            members = self.merge_map.get(rec.code, (rec.code,))
            self.add_node(members, rec.title)
        for rec in self.catalog.records:
            me = self.index[rec.code]
            for group in rec.prerequisites.conjuncts:
                share = 1.0 / len(group)
                for alt in group:
                    src = self.resolve(rec.code, alt)
                    self.contribute(rec.code, alt, src, me, share, Provenance.PREREQUISITE)
            for decl in rec.corequisites:
                self.add_coreq(rec, me, decl)

        arcs = []
        for (s, t), (w, provs) in self.contrib.items():
            prov = Provenance.PREREQUISITE if Provenance.PREREQUISITE in provs else Provenance.COREQUISITE
            arcs.append(CpnArc(s, t, min(w, 1.0), prov))
        cpn = Cpn(tuple(self.nodes), tuple(arcs))
        groups = _dedupe(self.merge_map.values())
        diags = BuildDiagnostics(
            merged_groups=groups,
            dangling_codes=tuple(self.dangling),
            stub_nodes=tuple(self.stubs),
            self_loops=tuple(self.self_loops),
        )
        return cpn, diags


def build_cpn(catalog: Catalog, policy: BuildPolicy | None = None):
    """Build the network for ``catalog``; returns ``(Cpn, BuildDiagnostics)``.

    Node ids follow first appearance in the (merged) catalogue; stub nodes
    for dangling references are appended as they are met. In directed
    corequisite mode every corequisite pair becomes one lecture -> lab arc,
    and a pair that cannot be told apart by title raises
    :class:`UnresolvedCorequisiteError`.
    """
    return _Builder(catalog, policy or BuildPolicy()).run()
