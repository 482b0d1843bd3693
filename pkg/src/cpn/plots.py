"""Matplotlib figures written next to the analysis report.

Only metric charts live here; drawing the network itself is left to
GraphML/DOT consumers.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
    "savefig.dpi": 150,
}
# strip the version stamp so reruns produce identical files
SAVE_METADATA = {"Software": None}


def _new(width=4.5, ratio=0.75):
    fig, ax = plt.subplots(figsize=(width, width * ratio))
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata=SAVE_METADATA)
    plt.close(fig)
    return path


def degree_vs_betweenness(cpn, metrics, path, rho=None):
    """Weighted degree against betweenness for nodes of the largest component."""
    pts = [(m.wk, m.betweenness, cpn.label(v)) for v, m in sorted(metrics.items()) if m.betweenness is not None]
    with plt.rc_context(STYLE):
        fig, ax = _new()
        if pts:
            xs, ys, _ = zip(*pts)
            ax.scatter(xs, ys, s=14, color="0.2", alpha=0.7, linewidths=0)
        ax.set_xlabel("weighted degree")
        ax.set_ylabel("betweenness centrality")
        if rho is not None:
            ax.set_title(f"Spearman $\\rho$ = {rho:.2f}", loc="left")
        return _save(fig, path)


def component_sizes(sizes, path):
    """Bar chart of how many weakly connected components have each size."""
    counts = {}
    for s in sizes:
        counts[s] = counts.get(s, 0) + 1
    with plt.rc_context(STYLE):
        fig, ax = _new()
        if counts:
            xs = sorted(counts)
            ax.bar([str(x) for x in xs], [counts[x] for x in xs], color="0.35")
            if max(counts.values()) > 50:
                ax.set_yscale("log")
        ax.set_xlabel("component size (courses)")
        ax.set_ylabel("number of components")
        return _save(fig, path)


def out_degree_ranking(rows, path):
    """Horizontal bars for a top-N table of ``(label, value)`` rows."""
    with plt.rc_context(STYLE):
        fig, ax = _new(width=4.5, ratio=max(0.4, 0.12 * max(len(rows), 1)))
        labels = [r[0] for r in rows][::-1]
        values = [r[1] for r in rows][::-1]
        ax.barh(labels, values, color="0.35")
        ax.set_xlabel("weighted out-degree")
        return _save(fig, path)


def render_figures(cpn, metrics, components, out_dir, tables=None, rho=None) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [
        degree_vs_betweenness(cpn, metrics, out / "degree_vs_betweenness.png", rho),
        component_sizes(components.sizes(), out / "component_sizes.png"),
    ]
    if tables and tables.get("top_out_degree"):
        written.append(out_degree_ranking(tables["top_out_degree"], out / "top_out_degree.png"))
    return written
