"""Symbol-string article encodings and pairwise article similarity.

Distance runs over symbol-id sequences; the glyph string is only a
serialization convenience.  Matrix dumps are CSV with node ids as the
header row/column and 6-decimal values.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import SentenceRecord
from .matching import SymbolTable

METRICS = ("edit", "overlap")


@dataclass(frozen=True)
class ArticleString:
    article_id: str
    symbols: tuple[int, ...]
    glyph_string: str


@dataclass
class SimilarityMatrix:
    """Symmetric article-to-article similarities in [0,1], zero diagonal."""

    node_ids: list[str]
    values: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.node_ids)
        if self.values.shape != (n, n):
            raise ValueError(f"matrix shape {self.values.shape} != ({n}, {n})")
        if n and not np.allclose(self.values, self.values.T, atol=1e-12):
            raise ValueError("similarity matrix not symmetric")
        if n and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ValueError("similarity values outside [0, 1]")
        if n and np.any(np.diag(self.values) != 0.0):
            raise ValueError("similarity diagonal must be zero")

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + self.node_ids)
            for i, nid in enumerate(self.node_ids):
                writer.writerow([nid] + [f"{v:.6f}" for v in self.values[i]])


def encode_article(sentences: list[SentenceRecord], table: SymbolTable) -> ArticleString:
    """Article as its sentence symbols in sentence-index order."""
    ordered = sorted(sentences, key=lambda s: s.index)
    symbols = []
    for s in ordered:
        key = (s.article_id, s.index)
        if key not in table.symbol_of:
            raise KeyError(f"no symbol for sentence {key}")
        symbols.append(table.symbol_of[key])
    glyphs = "".join(table.glyph_of[sym] for sym in symbols)
    article_id = sentences[0].article_id if sentences else ""
    return ArticleString(article_id=article_id, symbols=tuple(symbols), glyph_string=glyphs)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost insert/delete/substitute edit distance (two-row DP)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, y in enumerate(b, start=1):
            cur[j] = min(
                prev[j] + 1,  # delete x
                cur[j - 1] + 1,  # insert y
                prev[j - 1] + (x != y),
            )
        prev = cur
    return prev[-1]


def edit_similarity(a: ArticleString, b: ArticleString) -> float:
    """1 - levenshtein/max(len); two empty encodings share nothing -> 0."""
    longest = max(len(a.symbols), len(b.symbols))
    if longest == 0:
        return 0.0
    return 1.0 - levenshtein(a.symbols, b.symbols) / longest


def overlap_coefficient(a: ArticleString, b: ArticleString) -> float:
    """|set(a) & set(b)| / min(|set(a)|, |set(b)|); empty set -> 0."""
    sa, sb = set(a.symbols), set(b.symbols)
    if not sa or not sb:
        return 0.0
    return len(sa & sb) / min(len(sa), len(sb))


def article_matrix(articles: list[ArticleString], metric: str = "edit") -> SimilarityMatrix:
    """Pairwise similarity over all unordered pairs; diagonal stays zero."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    ids = [a.article_id for a in articles]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate article ids: {dupes}")
    fn = edit_similarity if metric == "edit" else overlap_coefficient
    n = len(articles)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = fn(articles[i], articles[j])
    return SimilarityMatrix(node_ids=ids, values=values)
