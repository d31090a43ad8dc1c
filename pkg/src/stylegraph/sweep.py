"""Threshold sensitivity sweep: rebuild article networks over a
(tau1, tau2) grid and average normalized Manhattan distances.

Embeddings and sentiments are computed once upstream; each grid cell only
re-thresholds the cached all-pairs cosine/sentiment matrices, which makes
the full sweep cheap.  Surface CSVs (grid values as header row/column)
are written by the CLI for external heatmap plotting.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .article_sim import ArticleString, article_matrix
from .matching import (
    MatchParams,
    ScoredSentence,
    components_from_thresholds,
    glyph_for,
    match_matrices,
)
from .networks import WeightedNetwork

DEFAULT_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)


@dataclass(frozen=True)
class SweepGrid:
    tau1_values: tuple[float, ...] = DEFAULT_GRID
    tau2_values: tuple[float, ...] = DEFAULT_GRID

    def __post_init__(self) -> None:
        for name, values, upper_inclusive in (
            ("tau1", self.tau1_values, False),
            ("tau2", self.tau2_values, True),
        ):
            if not values:
                raise ValueError(f"{name} grid is empty")
            if sorted(set(values)) != list(values):
                raise ValueError(f"{name} grid must be ascending and unique")
            top_ok = values[-1] <= 1.0 if upper_inclusive else values[-1] < 1.0
            if values[0] <= 0.0 or not top_ok:
                raise ValueError(f"{name} grid values out of range: {values}")


@dataclass
class DistanceSurface:
    """Mean network distance for every pair of one threshold's grid values."""

    axis: str  # "tau1" | "tau2"
    values: tuple[float, ...]
    matrix: np.ndarray

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([self.axis] + [f"{v:g}" for v in self.values])
            for i, v in enumerate(self.values):
                writer.writerow([f"{v:g}"] + [f"{x:.6f}" for x in self.matrix[i]])


def _matrix_distance(a: np.ndarray, b: np.ndarray) -> float:
    n = a.shape[0]
    if n <= 1:
        return 0.0
    return float(np.abs(a - b).sum() / (n * (n - 1)))


def network_distance(a: WeightedNetwork, b: WeightedNetwork) -> float:
    """Normalized Manhattan distance: sum |A - B| over ordered off-diagonal
    entries divided by N(N-1).  Node sets and ordering must match."""
    if a.node_ids != b.node_ids:
        raise ValueError("networks must share the same nodes in the same order")
    return _matrix_distance(a.adjacency, b.adjacency)


def grid_adjacencies(
    sentences: list[ScoredSentence], grid: SweepGrid, metric: str = "edit"
) -> dict[tuple[float, float], np.ndarray]:
    """Article-network adjacency for every (tau1, tau2) cell of one event.

    Article node order is sorted article id, constant across cells.
    """
    article_ids = sorted({s.record.article_id for s in sentences})
    by_article: dict[str, list] = {aid: [] for aid in article_ids}
    for s in sentences:
        by_article[s.record.article_id].append(s.record)
    cos, sdiff = match_matrices(sentences)
    out = {}
    for tau1, tau2 in itertools.product(grid.tau1_values, grid.tau2_values):
        params = MatchParams(tau1=tau1, tau2=tau2)
        labels = components_from_thresholds(cos, sdiff, params)
        symbol_of = {s.key: labels[i] for i, s in enumerate(sentences)}
        encodings = []
        for aid in article_ids:
            records = sorted(by_article[aid], key=lambda r: r.index)
            syms = tuple(symbol_of[(r.article_id, r.index)] for r in records)
            glyphs = "".join(glyph_for(sym) for sym in syms)
            encodings.append(ArticleString(article_id=aid, symbols=syms, glyph_string=glyphs))
        out[(tau1, tau2)] = article_matrix(encodings, metric=metric).values
    return out


def run_sweep(
    event_sentences: dict[str, list[ScoredSentence]],
    grid: SweepGrid,
    metric: str = "edit",
) -> tuple[DistanceSurface, DistanceSurface]:
    """Distance surfaces for tau1 and tau2 across all events.

    surface_tau1[v, w] averages network_distance(net(v, t2), net(w, t2))
    over every event and every t2 in the grid; surface_tau2 swaps the
    roles.  Events contribute with equal weight.
    """
    if not event_sentences:
        raise ValueError("sweep needs at least one event")
    nets = {
        event_id: grid_adjacencies(sentences, grid, metric=metric)
        for event_id, sentences in sorted(event_sentences.items())
    }
    n1, n2 = len(grid.tau1_values), len(grid.tau2_values)
    surf1 = np.zeros((n1, n1))
    surf2 = np.zeros((n2, n2))
    for cells in nets.values():
        for (i, v), (j, w) in itertools.combinations(enumerate(grid.tau1_values), 2):
            d = np.mean([_matrix_distance(cells[(v, t2)], cells[(w, t2)]) for t2 in grid.tau2_values])
            surf1[i, j] += d
            surf1[j, i] += d
        for (i, v), (j, w) in itertools.combinations(enumerate(grid.tau2_values), 2):
            d = np.mean([_matrix_distance(cells[(t1, v)], cells[(t1, w)]) for t1 in grid.tau1_values])
            surf2[i, j] += d
            surf2[j, i] += d
    surf1 /= len(nets)
    surf2 /= len(nets)
    return (
        DistanceSurface(axis="tau1", values=grid.tau1_values, matrix=surf1),
        DistanceSurface(axis="tau2", values=grid.tau2_values, matrix=surf2),
    )
