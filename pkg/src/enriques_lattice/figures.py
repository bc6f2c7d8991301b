"""Matplotlib renderings for the ``report`` subcommand (Agg backend, files only)."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .coxeter import CoxeterDiagram  # noqa: E402

FAMILY_STYLE = {
    "E_vertex": ("#1f4e79", "o"),
    "E_edge": ("#5b9bd5", "o"),
    "F": ("#c55a11", "s"),
    "G": ("#548235", "D"),
}


def _layout(d: CoxeterDiagram) -> dict:
    """Rings by family: tetrahedron vertices inside, edges around them, 6B and 4C outside."""
    pos = {}
    rings = {"E_vertex": 1.0, "E_edge": 2.0, "F": 3.1, "G": 4.2}
    offset = {"E_vertex": math.pi / 4, "E_edge": math.pi / 6, "F": 0.0, "G": math.pi / 4}
    for fam, radius in rings.items():
        members = [v for v in d.vertices if v.family == fam]
        for k, v in enumerate(members):
            t = offset[fam] + 2 * math.pi * k / len(members)
            pos[v] = (radius * math.cos(t), radius * math.sin(t))
    return pos


def draw_coxeter_diagram(d: CoxeterDiagram, path: Path) -> Path:
    pos = _layout(d)
    fig, ax = plt.subplots(figsize=(7, 7))
    n = len(d.vertices)
    for a in range(n):
        for b in range(a + 1, n):
            w = d.weights[a][b]
            if not w:
                continue
            (x0, y0), (x1, y1) = pos[d.vertices[a]], pos[d.vertices[b]]
            ax.plot([x0, x1], [y0, y1], color="0.35" if w == 1 else "#a50021",
                    lw=0.8 if w == 1 else 2.2, zorder=1)
    for v in d.vertices:
        colour, marker = FAMILY_STYLE[v.family]
        ax.scatter(*pos[v], s=260, c=colour, marker=marker, zorder=2, edgecolors="white")
        ax.annotate(str(v), pos[v], ha="center", va="center", fontsize=6.5, color="white", zorder=3)
    ax.plot([], [], color="0.35", lw=0.8, label="weight 1")
    ax.plot([], [], color="#a50021", lw=2.2, label="weight 2")
    ax.legend(loc="lower right", frameon=False, fontsize=8)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title("Coxeter diagram of the 20 roots")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def draw_census(counts: Mapping[str, int], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    names = list(counts)
    bars = ax.bar(range(len(names)), [counts[k] for k in names], color="#5b9bd5")
    ax.bar_label(bars)
    ax.set_xticks(range(len(names)), names, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("maximal parabolic subdiagrams")
    ax.spines[["top", "right"]].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def draw_ball_growth(lengths: Sequence[int], sizes: Sequence[int], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(lengths, sizes, marker="o", color="#1f4e79")
    ax.set_yscale("log")
    ax.set_xlabel("maximal word length")
    ax.set_ylabel("distinct curve classes")
    ax.set_xticks(list(lengths))
    ax.spines[["top", "right"]].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
