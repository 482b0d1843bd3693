"""Curriculum prerequisite networks built from course catalogues."""

__version__ = "0.1.0"

from .builder import (
    BuildDiagnostics,
    BuildPolicy,
    Cpn,
    CpnArc,
    CpnNode,
    build_cpn,
    resolve_cross_listings,
)
from .dag import detect_cycles, enforce_dag, is_dag, topological_order
from .metrics import (
    betweenness,
    degree_metrics,
    density,
    node_metrics,
    path_metrics,
    spearman,
    summarize,
    weakly_connected_components,
)
from .model import Catalog, CourseCode, CourseRecord, normalize_code, validate_catalog
from .parser import (
    load_catalog,
    parse_catalog_structured,
    parse_catalog_text,
    parse_clause,
    serialize_catalog_structured,
)
from .export import ExportOptions, export_dot, export_graphml, export_report
from .roles import Role, RoleThresholds, classify_roles, top_table

__all__ = [
    "BuildDiagnostics", "BuildPolicy", "Catalog", "CourseCode", "CourseRecord", "Cpn", "CpnArc", "CpnNode",
    "ExportOptions", "Role", "RoleThresholds", "betweenness", "build_cpn", "classify_roles", "degree_metrics",
    "density", "detect_cycles", "enforce_dag", "export_dot", "export_graphml", "export_report", "is_dag",
    "load_catalog", "node_metrics", "normalize_code", "parse_catalog_structured", "parse_catalog_text",
    "parse_clause", "path_metrics", "resolve_cross_listings", "sample_catalog_text",
    "serialize_catalog_structured", "spearman", "summarize", "top_table", "topological_order",
    "validate_catalog", "weakly_connected_components",
]


def sample_catalog_text() -> str:
    """The bundled hypothetical catalogue excerpt."""
    from importlib.resources import files

    return files(__package__).joinpath("data/sample_catalog.txt").read_text(encoding="utf-8")
