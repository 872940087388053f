"""Figures for relation systems and partition layouts.

Uses the object-oriented matplotlib API (no pyplot global state), so
figures can be rendered from library code and from the CLI alike.
"""
from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")
from matplotlib import colormaps  # noqa: E402
from matplotlib.backends.backend_agg import FigureCanvasAgg  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .partition import Partition  # noqa: E402
from .relations import RelationSystem  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.linewidth": 0.8,
    "savefig.dpi": 150,
}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    FigureCanvasAgg(fig)
    fig.savefig(path, bbox_inches="tight", metadata={"Software": None})
    return path


def plot_relation_system(system: RelationSystem, path, title: str | None = None) -> Path:
    """One boolean adjacency matrix per relation, side by side."""
    n = len(system.universe)
    k = max(len(system), 1)
    with matplotlib.rc_context(STYLE):
        size = 0.25 * n + 1.2
        fig = Figure(figsize=(size * k, size + 0.4))
        axes = fig.subplots(1, k, squeeze=False)[0]
        for ax, (name, rel) in zip(axes, system.relations):
            grid = [[(row >> j) & 1 for j in range(n)] for row in rel.rows]
            ax.imshow(grid, cmap="Greys", vmin=0, vmax=1, interpolation="nearest")
            ax.set_title(name)
            ax.set_xticks(range(n), system.universe, rotation=90)
            ax.set_yticks(range(n), system.universe)
            ax.tick_params(length=0)
        if title:
            fig.suptitle(title)
        return _save(fig, path)


def plot_partition_layout(columns: Mapping[str, Partition], path, title: str | None = None) -> Path:
    """Objects down, partitions across; each cell shows the block holding the object."""
    names = list(columns)
    universe = columns[names[0]].universe if names else ()
    cmap = colormaps["tab20"]
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(1.0 + 0.9 * len(names), 0.8 + 0.3 * len(universe)))
        ax = fig.subplots()
        for c, name in enumerate(names):
            part = columns[name]
            for r, x in enumerate(universe):
                b = part.block_of[x]
                ax.add_patch(Rectangle(
                    (c, r), 1, 1, facecolor=cmap(b % 20), edgecolor="white"))
                ax.text(c + 0.5, r + 0.5, f"C{b + 1}", ha="center", va="center", fontsize=7)
        ax.set_xlim(0, len(names))
        ax.set_ylim(len(universe), 0)
        ax.set_xticks([c + 0.5 for c in range(len(names))], names)
        ax.set_yticks([r + 0.5 for r in range(len(universe))], universe)
        ax.xaxis.tick_top()
        ax.tick_params(length=0)
        for side in ax.spines.values():
            side.set_visible(False)
        if title:
            fig.suptitle(title)
        return _save(fig, path)
