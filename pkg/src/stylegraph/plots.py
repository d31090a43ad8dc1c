"""Matplotlib rendering of pipeline outputs: network layouts, sweep
heatmaps, and the comparison-suite report.

All figures are written to files (Agg backend); nothing opens a window.
Layouts use a seeded spring embedding so reruns produce identical pixels.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import ComparisonRow
from .networks import WeightedNetwork
from .sweep import DistanceSurface

BIAS_COLORS = {
    "far-left": "#08306b",
    "left": "#2171b5",
    "left-center": "#6baed6",
    "center": "#969696",
    "right-center": "#fc9272",
    "right": "#cb181d",
    "far-right": "#67000d",
}
UNLABELED_COLOR = "#ffffff"
DPI = 150


def spring_layout(adjacency: np.ndarray, seed: int = 0, iterations: int = 120) -> np.ndarray:
    """Deterministic Fruchterman-Reingold layout; returns (n, 2) positions."""
    n = adjacency.shape[0]
    if n == 0:
        return np.zeros((0, 2))
    rng = np.random.default_rng(seed)
    pos = rng.uniform(-1.0, 1.0, size=(n, 2))
    if n == 1:
        return pos
    k = 1.0 / np.sqrt(n)  # ideal pairwise distance
    t = 0.1
    dt = t / (iterations + 1)
    weights = adjacency / adjacency.max() if adjacency.max() > 0 else adjacency
    for _ in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(delta, axis=-1)
        np.fill_diagonal(dist, 1.0)
        repulse = k * k / dist**2
        attract = weights * dist / k
        force = ((repulse - attract)[:, :, None] * delta / dist[:, :, None]).sum(axis=1)
        length = np.linalg.norm(force, axis=1)
        length[length < 1e-12] = 1e-12
        pos += force / length[:, None] * np.minimum(length, t)[:, None]
        t -= dt
    pos -= pos.mean(axis=0)
    span = np.abs(pos).max()
    if span > 0:
        pos /= span
    return pos


def render_network(net: WeightedNetwork, path: str | Path, seed: int = 0, title: str = "") -> None:
    """Draw a network with node color by bias label, size by degree, edge
    width by weight."""
    pos = spring_layout(net.adjacency, seed=seed)
    fig, ax = plt.subplots(figsize=(6, 6))
    peak = net.adjacency.max()
    for src, dst, w in net.edges():
        i, j = net.index_of(src), net.index_of(dst)
        rel = w / peak if peak > 0 else 0.0
        ax.plot(
            [pos[i, 0], pos[j, 0]],
            [pos[i, 1], pos[j, 1]],
            color="#555555",
            linewidth=0.5 + 2.5 * rel,
            alpha=0.35 + 0.45 * rel,
            zorder=1,
        )
    degree = net.degree()
    sizes = 120 + 480 * (degree / degree.max() if degree.max() > 0 else degree)
    colors = [
        BIAS_COLORS.get(net.attributes.get(nid, {}).get("bias_label", ""), UNLABELED_COLOR)
        for nid in net.node_ids
    ]
    ax.scatter(pos[:, 0], pos[:, 1], s=sizes, c=colors, edgecolors="black", zorder=2)
    for i, nid in enumerate(net.node_ids):
        ax.annotate(nid, pos[i], fontsize=7, ha="center", va="bottom", xytext=(0, 6),
                    textcoords="offset points")
    ax.set_title(title)
    ax.set_axis_off()
    ax.set_xlim(-1.2, 1.2)
    ax.set_ylim(-1.2, 1.2)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_surface(surface: DistanceSurface, path: str | Path, title: str = "") -> None:
    """Heatmap of a sweep distance surface."""
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(surface.matrix, origin="lower", cmap="viridis", aspect="equal")
    ticks = range(len(surface.values))
    labels = [f"{v:g}" for v in surface.values]
    ax.set_xticks(ticks, labels, rotation=45, fontsize=8)
    ax.set_yticks(ticks, labels, fontsize=8)
    ax.set_xlabel(surface.axis)
    ax.set_ylabel(surface.axis)
    ax.set_title(title or f"mean network distance across {surface.axis}")
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_bench(rows: list[ComparisonRow], path: str | Path) -> None:
    """Heatmap of the numeric comparison-suite columns, one row per case."""
    metrics = ["jaccard", "levenshtein_ratio", "sentence_cosine", "token_vector_cosine", "sentiment_diff"]
    data = np.array(
        [
            [
                np.nan if getattr(r, m) is None else float(getattr(r, m))
                for m in metrics
            ]
            for r in rows
        ]
    )
    fig, ax = plt.subplots(figsize=(7, 0.45 * len(rows) + 1.8))
    im = ax.imshow(data, cmap="RdYlGn", vmin=-1.0, vmax=1.0, aspect="auto")
    ax.set_xticks(range(len(metrics)), metrics, rotation=30, ha="right", fontsize=8)
    ax.set_yticks(range(len(rows)), [r.case_name for r in rows], fontsize=8)
    for i in range(data.shape[0]):
        for j in range(data.shape[1]):
            if not np.isnan(data[i, j]):
                ax.text(j, i, f"{data[i, j]:.2f}", ha="center", va="center", fontsize=7)
    ax.set_title("text comparison measures per alteration")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
