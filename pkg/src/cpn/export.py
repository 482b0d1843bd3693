"""GraphML, DOT and report writers.

All writers are deterministic: nodes in ascending id, arcs by
(source, target). Real numbers in GraphML and DOT use six significant
digits (``format(x, "#.6g")``).
"""

from __future__ import annotations

import enum
import json
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

from .builder import BuildDiagnostics, Cpn
from .metrics import ComponentSet, SummaryReport

__all__ = [
    "ExportOptions",
    "MissingDataError",
    "Report",
    "SizeBy",
    "build_report",
    "export_dot",
    "export_graphml",
    "export_report",
    "format_real",
    "render_report_text",
]

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


class MissingDataError(ValueError):
    pass


class SizeBy(str, enum.Enum):
    NONE = "none"
    OUT_DEGREE = "out_degree"
    BETWEENNESS = "betweenness"


@dataclass(frozen=True)
class ExportOptions:
    include_weights: bool = True
    include_roles: bool = False
    size_by: SizeBy = SizeBy.NONE

    def __post_init__(self):
        object.__setattr__(self, "size_by", SizeBy(self.size_by))


def format_real(x: float) -> str:
    return format(float(x), "#.6g")


def _check_inputs(metrics, roles, options):
    if options.size_by is not SizeBy.NONE and metrics is None:
        raise MissingDataError(f"size_by={options.size_by.value} needs node metrics")
    if options.include_roles and roles is None:
        raise MissingDataError("include_roles needs a role assignment")


def _size(metrics, v, size_by):
    m = metrics[v]
    if size_by is SizeBy.OUT_DEGREE:
        return m.wk_out
    return m.betweenness if m.betweenness is not None else 0.0


def _role_text(roles, v):
    return ",".join(sorted(r.value for r in roles.get(v, ())))


# ------------------------------------------------------------------ graphml

_METRIC_KEYS = [
    ("k_in", "int"), ("k_out", "int"), ("k", "int"),
    ("wk_in", "double"), ("wk_out", "double"), ("wk", "double"),
    ("betweenness", "double"),
]


def export_graphml(cpn: Cpn, metrics=None, roles=None, options: ExportOptions | None = None) -> str:
    options = options or ExportOptions()
    _check_inputs(metrics, roles, options)
    root = ET.Element("graphml", {"xmlns": GRAPHML_NS})

    def key(kid, domain, name, typ):
        ET.SubElement(root, "key", {"id": kid, "for": domain, "attr.name": name, "attr.type": typ})

    key("label", "node", "label", "string")
    key("members", "node", "members", "string")
    key("title", "node", "title", "string")
    key("stub", "node", "stub", "boolean")
    if metrics is not None:
        for name, typ in _METRIC_KEYS:
            key(name, "node", name, typ)
    if options.include_roles:
        key("roles", "node", "roles", "string")
    if options.size_by is not SizeBy.NONE:
        key("size", "node", "size", "double")
    if options.include_weights:
        key("weight", "edge", "weight", "double")
    key("provenance", "edge", "provenance", "string")

    graph = ET.SubElement(root, "graph", {"id": "cpn", "edgedefault": "directed"})

    def data(parent, k, value):
        ET.SubElement(parent, "data", {"key": k}).text = value

    for node in cpn.nodes:
        el = ET.SubElement(graph, "node", {"id": f"n{node.id}"})
        data(el, "label", node.label)
        data(el, "members", ";".join(str(c) for c in node.member_codes))
        data(el, "title", node.title)
        data(el, "stub", "true" if node.stub else "false")
        if metrics is not None:
            m = metrics[node.id]
            for name, typ in _METRIC_KEYS:
                value = getattr(m, name)
                if value is None:
                    continue
                data(el, name, str(value) if typ == "int" else format_real(value))
        if options.include_roles:
            data(el, "roles", _role_text(roles, node.id))
        if options.size_by is not SizeBy.NONE:
            data(el, "size", format_real(_size(metrics, node.id, options.size_by)))
    for i, arc in enumerate(cpn.arcs):
        el = ET.SubElement(graph, "edge", {"id": f"e{i}", "source": f"n{arc.source}", "target": f"n{arc.target}"})
        if options.include_weights:
            data(el, "weight", format_real(arc.weight))
        data(el, "provenance", arc.provenance.value)
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


# ---------------------------------------------------------------------- dot


def _quote(text):
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(cpn: Cpn, metrics=None, roles=None, options: ExportOptions | None = None) -> str:
    options = options or ExportOptions()
    _check_inputs(metrics, roles, options)
    lines = ["digraph cpn {"]
    for node in cpn.nodes:
        attrs = []
        if node.stub:
            attrs.append("style=dashed")
        if options.include_roles:
            attrs.append(f"roles={_quote(_role_text(roles, node.id))}")
        if options.size_by is not SizeBy.NONE:
            attrs.append(f"size={format_real(_size(metrics, node.id, options.size_by))}")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_quote(node.label)}{suffix};")
    for arc in cpn.arcs:
        attrs = []
        if options.include_weights:
            w = format_real(arc.weight)
            attrs += [f"weight={w}", f"label={_quote(w)}"]
        if arc.provenance.value != "prerequisite":
            attrs.append("style=dotted")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_quote(cpn.label(arc.source))} -> {_quote(cpn.label(arc.target))}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------- report


class Report(NamedTuple):
    document: dict
    text: str

    def to_json(self) -> str:
        return json.dumps(self.document, indent=2, ensure_ascii=False) + "\n"


def _table_rows(rows):
    return [{"label": label, "value": value} for label, value in rows]


def _diagnostics_doc(cpn, diagnostics):
    d = diagnostics or BuildDiagnostics()

    def lbl(v):
        return cpn.label(v) if cpn is not None and v in cpn.node_by_id else str(v)

    return {
        "merged_groups": [[str(c) for c in g] for g in d.merged_groups],
        "dangling_codes": [str(c) for c in d.dangling_codes],
        "stub_nodes": [lbl(v) for v in d.stub_nodes],
        "self_loops": [[str(a), str(b)] for a, b in d.self_loops],
        "removed_arcs": [
            {"source": lbl(a.source), "target": lbl(a.target), "weight": a.weight, "provenance": a.provenance.value}
            for a in d.removed_arcs
        ],
        "unresolved_cycles": [[lbl(v) for v in cyc] for cyc in d.unresolved_cycles],
    }


def build_report(summary: SummaryReport, tables: dict, components: ComponentSet,
                 diagnostics: BuildDiagnostics | None = None, cpn: Cpn | None = None,
                 correlation: dict | None = None) -> dict:
    """Assemble the structured report. ``tables`` maps ``top_out_degree`` /
    ``top_betweenness`` to ``(label, value)`` rows; ``cpn`` supplies labels
    for node ids in the diagnostics."""
    sizes = components.sizes()
    histogram = sorted(Counter(sizes).items(), reverse=True)
    doc = {
        "summary": summary.to_dict(),
        "components": sizes,
        "component_size_histogram": [{"size": s, "count": c} for s, c in histogram],
        "top_out_degree": _table_rows(tables.get("top_out_degree", [])),
        "top_betweenness": _table_rows(tables.get("top_betweenness", [])),
        "diagnostics": _diagnostics_doc(cpn, diagnostics),
    }
    if correlation is not None:
        doc["correlation"] = correlation
    return doc


_ROWS = [
    ("nodes", "nodes", "{:,d}"),
    ("arcs", "arcs", "{:,d}"),
    ("density", "density", "{:.5f}"),
    ("weakly connected components", "components", "{:,d}"),
    ("degree", "mean_degree", "{:.2f}"),
    ("in-degree", "mean_in_degree", "{:.2f}"),
    ("out-degree", "mean_out_degree", "{:.2f}"),
    ("weighted degree", "mean_weighted_degree", "{:.2f}"),
    ("weighted in-degree", "mean_weighted_in_degree", "{:.2f}"),
    ("weighted out-degree", "mean_weighted_out_degree", "{:.2f}"),
    ("diameter", "diameter", "{:d}"),
    ("characteristic path length", "characteristic_path_length", "{:.2f}"),
    ("betweenness centrality", "mean_betweenness", "{:.6f}"),
]


def _cell(fmt, value):
    return "--" if value is None else fmt.format(value)


def render_report_text(doc: dict) -> str:
    full = doc["summary"]["full"]
    lcc = doc["summary"]["largest_component"]
    header = ("Metrics", "Full CPN", "Largest connected component")
    body = [(name, _cell(fmt, full[k]), _cell(fmt, lcc[k])) for name, k, fmt in _ROWS]
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(3)]

    def line(r):
        return f"{r[0]:<{widths[0]}}  {r[1]:>{widths[1]}}  {r[2]:>{widths[2]}}".rstrip()

    out = [line(header), "  ".join("-" * w for w in widths)]
    out += [line(r) for r in body]

    out.append("")
    out.append("Component sizes: " + (", ".join(map(str, doc["components"])) or "none"))
    for title, key, fmt in (
        ("Top courses by weighted out-degree", "top_out_degree", "{:.1f}"),
        ("Top courses by betweenness (largest component)", "top_betweenness", "{:.6f}"),
    ):
        rows = doc[key]
        out.append("")
        out.append(f"{title}:")
        if not rows:
            out.append("  (none)")
        for i, row in enumerate(rows, 1):
            out.append(f"  {i:>2}. {row['label']:<24} {fmt.format(row['value'])}")

    corr = doc.get("correlation")
    if corr:
        out.append("")
        if corr.get("rho") is None:
            out.append(f"Spearman (weighted degree vs betweenness): undefined ({corr.get('reason', '')})")
        else:
            out.append(
                f"Spearman (weighted degree vs betweenness): rho = {corr['rho']:.2f}, "
                f"p = {corr['p']:.4g}, n = {corr['n']}"
            )

    diag = doc["diagnostics"]
    notes = []
    if diag["merged_groups"]:
        notes.append(f"merged cross-listings: {'; '.join('/'.join(g) for g in diag['merged_groups'])}")
    if diag["dangling_codes"]:
        notes.append(f"dangling references: {', '.join(diag['dangling_codes'])}")
    for arc in diag["removed_arcs"]:
        notes.append(f"removed arc {arc['source']} -> {arc['target']} ({arc['provenance']})")
    for cyc in diag["unresolved_cycles"]:
        notes.append("unresolved cycle: " + " -> ".join(cyc))
    if notes:
        out.append("")
        out.append("Diagnostics:")
        out += [f"  {n}" for n in notes]
    return "\n".join(out) + "\n"


def export_report(summary: SummaryReport, tables: dict, components: ComponentSet,
                  diagnostics: BuildDiagnostics | None = None, cpn: Cpn | None = None,
                  correlation: dict | None = None) -> Report:
    doc = build_report(summary, tables, components, diagnostics, cpn, correlation)
    return Report(doc, render_report_text(doc))
