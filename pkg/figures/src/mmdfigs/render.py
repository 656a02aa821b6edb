"""Draw plot-data structures with matplotlib and write image files.

Every figure is written twice: at the requested path and again with the
sibling extension (PNG <-> SVG), the SVG being the comparison artifact.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .plotdata import (BenchData, FigureSpec, HistData, PowerData, RocData,
                       build)


def draw_hist(data: HistData):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.hist(data.values, bins=data.bin_edges, density=True, alpha=0.55,
            color="#1f77b4", edgecolor="white", label="statistic")
    ax.plot(data.overlay_x, data.overlay_y, "k-", lw=1.5, label="N(0,1) density")
    ax.set_xlabel("statistic")
    ax.set_ylabel("density")
    ax.set_title(data.title)
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def draw_power(data: PowerData):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for s in data.series:
        line, = ax.plot(s.sizes, s.power, "-o", ms=3.5, label=s.test)
        ax.fill_between(s.sizes, s.power - s.band, s.power + s.band,
                        alpha=0.25, color=line.get_color())
        if s.predicted is not None:
            ax.plot(s.sizes, s.predicted, "--", color="forestgreen",
                    label=f"predicted perm (from {s.test})")
    ax.set_xlabel("sample size (n+m)")
    ax.set_ylabel("power")
    ax.set_ylim(-0.02, 1.05)
    ax.set_title(data.title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


def draw_roc(data: RocData):
    fig, ax = plt.subplots(figsize=(5, 4.5))
    for c in data.curves:
        ax.step(c.fpr, c.tpr, where="post", label=c.legend)
    ax.plot([0, 1], [0, 1], ":", color="gray", lw=1)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(data.title)
    ax.legend(frameon=False, fontsize=8, loc="lower right")
    fig.tight_layout()
    return fig


def draw_bench(data: BenchData):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    max_size = max(p.size for p in data.points)
    seen = set()
    colors = {}
    for p in data.points:
        if p.test not in colors:
            colors[p.test] = f"C{len(colors)}"
        label = p.test if p.test not in seen else None
        seen.add(p.test)
        ax.scatter(p.median_s, p.power, s=20 + 180 * p.size / max_size,
                   color=colors[p.test], alpha=0.7, label=label)
    ax.set_xscale("log")
    ax.set_xlabel("running time (seconds)")
    ax.set_ylabel("power")
    ax.set_ylim(-0.02, 1.05)
    ax.set_title(data.title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


_DRAWERS = {
    HistData: draw_hist,
    PowerData: draw_power,
    RocData: draw_roc,
    BenchData: draw_bench,
}


def _sibling(path: Path) -> Path:
    other = ".svg" if path.suffix.lower() != ".svg" else ".png"
    return path.with_suffix(other)


def render(spec: FigureSpec) -> list[str]:
    """Build the plot data, draw it, and write PNG + SVG.

    Returns the written paths (requested one first).
    """
    data = build(spec)
    fig = _DRAWERS[type(data)](data)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    paths = [out, _sibling(out)]
    try:
        for p in paths:
            fig.savefig(p)
    finally:
        plt.close(fig)
    return [str(p) for p in paths]
