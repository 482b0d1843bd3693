"""Command line front end.

Exit codes: 0 ok, 1 validation failure or cycles found, 2 I/O or usage
error, 3 DAG required but cycles remain, 4 cycle enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .builder import (
    BuildPolicy,
    CoreqBuildMode,
    DanglingMode,
    DanglingReferenceError,
    UnresolvedCorequisiteError,
    build_cpn,
)
from .dag import DEFAULT_MAX_CYCLES, CycleLimitError, detect_cycles, enforce_dag, is_dag
from .export import ExportOptions, export_dot, export_graphml, export_report
from .metrics import DegenerateInputError, node_metrics, spearman, summarize, weakly_connected_components
from .model import MalformedCodeError, Severity, has_errors, validate_catalog
from .parser import CatalogParseError, SchemaError, load_catalog
from .roles import RoleThresholds, classify_roles, top_table

log = logging.getLogger("cpn")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_NOT_DAG = 3
EXIT_CAP = 4

_DANGLING = {"stub": DanglingMode.CREATE_STUB, "drop": DanglingMode.DROP, "error": DanglingMode.ERROR}


class CliError(Exception):
    def __init__(self, message, status):
        super().__init__(message)
        self.status = status


def _add_input_args(p, coreq_default):
    p.add_argument("--input", "-i", required=True, type=Path, help="catalogue file")
    p.add_argument("--format", dest="input_format", choices=["text", "structured", "auto"], default="auto")
    p.add_argument("--source-label", default="", help="label stored with a text catalogue")
    p.add_argument("--coreq", choices=[m.value for m in CoreqBuildMode], default=coreq_default)
    p.add_argument("--dangling", choices=sorted(_DANGLING), default="stub")
    p.add_argument("--lab-marker", action="append", dest="lab_markers", metavar="TEXT",
                   help="title substring marking a lab course (repeatable; default: lab, laboratory)")
    p.add_argument("--max-cycles", type=int, default=DEFAULT_MAX_CYCLES)


def build_parser():
    parser = argparse.ArgumentParser(prog="cpn", description="Curriculum prerequisite network toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a catalogue and check references")
    p.add_argument("--input", "-i", required=True, type=Path)
    p.add_argument("--format", dest="input_format", choices=["text", "structured", "auto"], default="auto")
    p.add_argument("--source-label", default="")

    p = sub.add_parser("analyze", help="build the network, compute metrics, write report and exports")
    _add_input_args(p, "directed")
    p.add_argument("--no-enforce-dag", dest="enforce_dag", action="store_false",
                   help="skip removal of lab -> lecture corequisite arcs")
    p.add_argument("--require-dag", action="store_true", help="exit 3 if cycles remain")
    p.add_argument("--export", action="append", dest="exports", choices=["graphml", "dot"], default=[])
    p.add_argument("--out", action="append", dest="outs", type=Path, default=[])
    p.add_argument("--report", type=Path, help="write the JSON report here")
    p.add_argument("--figures", type=Path, metavar="DIR", help="write PNG charts into DIR")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--permutations", type=int, default=10_000)
    p.add_argument("--include-roles", action="store_true", help="attach roles to exported nodes")
    p.add_argument("--size-by", choices=["none", "out_degree", "betweenness"], default="none")

    p = sub.add_parser("cycles", help="list every elementary cycle")
    _add_input_args(p, "bidirectional")
    return parser


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def _load(args):
    data = _read(args.input)
    try:
        catalog, diags = load_catalog(data, args.input_format, args.source_label)
    except (CatalogParseError, SchemaError, MalformedCodeError, UnicodeDecodeError) as exc:
        raise CliError(f"{args.input}: {exc}", EXIT_INVALID) from None
    for d in diags:
        log.warning("%s: %s", args.input, d)
    return catalog, diags


def _policy(args):
    markers = tuple(args.lab_markers) if args.lab_markers else ("lab", "laboratory")
    try:
        return BuildPolicy(args.coreq, _DANGLING[args.dangling], markers)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INVALID) from None


def _build(args):
    catalog, _ = _load(args)
    findings = validate_catalog(catalog)
    if has_errors(findings):
        for f in findings:
            if f.severity is Severity.ERROR:
                print(f, file=sys.stderr)
        raise CliError("catalogue has validation errors", EXIT_INVALID)
    policy = _policy(args)
    try:
        cpn, diags = build_cpn(catalog, policy)
    except (DanglingReferenceError, UnresolvedCorequisiteError) as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    return cpn, diags, policy


def _cycle_lines(cpn, cycles):
    return [" -> ".join(cpn.label(v) for v in cyc) for cyc in cycles]


def cmd_validate(args) -> int:
    catalog, diags = _load(args)
    findings = validate_catalog(catalog)
    for f in findings:
        print(f)
    errors = sum(f.severity is Severity.ERROR for f in findings)
    print(f"{len(catalog)} courses, {errors} errors, {len(findings) - errors} warnings, "
          f"{len(diags)} parse diagnostics")
    return EXIT_INVALID if errors else EXIT_OK


def cmd_cycles(args) -> int:
    cpn, _, _ = _build(args)
    try:
        cycles = detect_cycles(cpn, args.max_cycles)
    except CycleLimitError as exc:
        raise CliError(str(exc), EXIT_CAP) from None
    print(f"{len(cycles)} cycles")
    for line in _cycle_lines(cpn, cycles):
        print(line)
    return EXIT_OK if not cycles else EXIT_INVALID


def _correlation(metrics, components, permutations, seed):
    nodes = components.largest
    xs = [metrics[v].wk for v in nodes]
    ys = [metrics[v].betweenness for v in nodes]
    doc = {"x": "weighted_degree", "y": "betweenness", "n": len(nodes),
           "permutations": permutations, "seed": seed}
    try:
        res = spearman(xs, ys, permutations=permutations, seed=seed)
    except (DegenerateInputError, ValueError) as exc:
        return {**doc, "rho": None, "p": None, "reason": str(exc)}
    return {**doc, "rho": res.rho, "p": res.p}


def cmd_analyze(args) -> int:
    if len(args.exports) != len(args.outs):
        raise CliError("--export and --out must be given in pairs", EXIT_IO)
    if args.top < 1:
        raise CliError("--top must be positive", EXIT_IO)
    cpn, diags, policy = _build(args)
    try:
        if args.enforce_dag:
            cpn, diags = enforce_dag(cpn, policy, diags, args.max_cycles)
        elif args.require_dag and not is_dag(cpn):
            from dataclasses import replace

            diags = replace(diags, unresolved_cycles=tuple(detect_cycles(cpn, args.max_cycles)))
    except CycleLimitError as exc:
        raise CliError(str(exc), EXIT_CAP) from None

    if args.require_dag and diags.unresolved_cycles:
        print(f"{len(diags.unresolved_cycles)} unresolved cycles:", file=sys.stderr)
        for line in _cycle_lines(cpn, diags.unresolved_cycles):
            print(f"  {line}", file=sys.stderr)
        return EXIT_NOT_DAG

    components = weakly_connected_components(cpn)
    metrics = node_metrics(cpn, components)
    summary = summarize(cpn, metrics, components)
    roles = classify_roles(cpn, metrics, RoleThresholds(args.top, args.top))
    tables = {
        "top_out_degree": top_table(cpn, metrics, "weighted_out_degree", args.top, include_ties=True),
        "top_betweenness": top_table(cpn, metrics, "betweenness", args.top, include_ties=True),
    }
    correlation = _correlation(metrics, components, args.permutations, args.seed)
    report = export_report(summary, tables, components, diags, cpn, correlation)

    options = ExportOptions(include_roles=args.include_roles, size_by=args.size_by)
    for fmt, out in zip(args.exports, args.outs):
        writer = export_graphml if fmt == "graphml" else export_dot
        _write(out, writer(cpn, metrics, roles, options))
    if args.report:
        _write(args.report, report.to_json())
    if args.figures:
        from .plots import render_figures

        try:
            render_figures(cpn, metrics, components, args.figures, tables, correlation["rho"])
        except OSError as exc:
            raise CliError(f"cannot write figures: {exc}", EXIT_IO) from None
    sys.stdout.write(report.text)
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "analyze": cmd_analyze, "cycles": cmd_cycles}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"cpn: {exc}", file=sys.stderr)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
