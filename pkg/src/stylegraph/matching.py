"""Sentence-pair matching and the per-event unique-sentence symbol table.

Two sentences match when their embedding cosine exceeds tau1 AND their
sentiment compounds differ by at most tau2.  Matching is closed
transitively: connected components of the match graph become symbols,
and each symbol gets a unique glyph from a fixed codepoint block so
articles can be rendered as strings.

Glyph blocks (documented for byte-for-byte reproducible encodings):
U+4E00..U+9FFF (CJK Unified Ideographs, 20,992 codepoints), extended by
U+AC00..U+D7A3 (Hangul Syllables, 11,172) if ever exhausted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import SentenceRecord
from .providers import cosine

GLYPH_BLOCKS = ((0x4E00, 0x9FFF), (0xAC00, 0xD7A3))

SentenceKey = tuple[str, int]  # (article_id, sentence index)


@dataclass(frozen=True)
class MatchParams:
    """Semantic threshold tau1 in (0,1) and sentiment threshold tau2 in (0,1]."""

    tau1: float = 0.7
    tau2: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 < self.tau1 < 1.0:
            raise ValueError(f"tau1 must be in (0, 1), got {self.tau1}")
        if not 0.0 < self.tau2 <= 1.0:
            raise ValueError(f"tau2 must be in (0, 1], got {self.tau2}")


@dataclass(frozen=True)
class ScoredSentence:
    record: SentenceRecord
    embedding: np.ndarray
    sentiment: float

    @property
    def key(self) -> SentenceKey:
        return (self.record.article_id, self.record.index)


@dataclass
class SymbolTable:
    """Sentence-key -> symbol id, with one unique glyph per symbol."""

    symbol_of: dict[SentenceKey, int] = field(default_factory=dict)
    glyph_of: dict[int, str] = field(default_factory=dict)
    classes: dict[int, list[SentenceKey]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.classes)

    def dump(self, path: str | Path) -> None:
        """Line-delimited {symbol_id, glyph codepoint, sentence_keys}."""
        with Path(path).open("w", encoding="utf-8") as fh:
            for sym in sorted(self.classes):
                rec = {
                    "symbol_id": sym,
                    "glyph": ord(self.glyph_of[sym]),
                    "sentence_keys": [[a, i] for a, i in self.classes[sym]],
                }
                fh.write(json.dumps(rec) + "\n")


def glyph_for(symbol_id: int) -> str:
    remaining = symbol_id
    for lo, hi in GLYPH_BLOCKS:
        size = hi - lo + 1
        if remaining < size:
            return chr(lo + remaining)
        remaining -= size
    raise ValueError(f"symbol id {symbol_id} exceeds the glyph alphabet")


def pair_similarity(a: ScoredSentence, b: ScoredSentence, p: MatchParams) -> float:
    """Embedding cosine if the pair matches under (tau1, tau2), else 0.

    Cosine is clamped to [-1, 1] before thresholding; sentiment ties at
    exactly tau2 still match.
    """
    c = cosine(a.embedding, b.embedding)
    if c > p.tau1 and abs(a.sentiment - b.sentiment) <= p.tau2:
        return c
    return 0.0


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]


def match_matrices(sentences: list[ScoredSentence]) -> tuple[np.ndarray, np.ndarray]:
    """All-pairs cosine and |sentiment difference| matrices for one event.

    Computed once so threshold sweeps can re-derive match graphs cheaply.
    """
    n = len(sentences)
    if n == 0:
        return np.zeros((0, 0)), np.zeros((0, 0))
    dims = {s.embedding.shape for s in sentences}
    if len(dims) > 1:
        raise ValueError(f"mixed embedding dims in event: {sorted(dims)}")
    emb = np.stack([s.embedding for s in sentences]).astype(float)
    norms = np.linalg.norm(emb, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValueError("zero-norm embedding")
    unit = emb / norms
    cos = np.clip(unit @ unit.T, -1.0, 1.0)
    sent = np.array([s.sentiment for s in sentences], dtype=float)
    sdiff = np.abs(sent[:, None] - sent[None, :])
    return cos, sdiff


def components_from_thresholds(
    cos: np.ndarray, sdiff: np.ndarray, p: MatchParams
) -> list[int]:
    """Connected components of the thresholded match graph, as a label per
    sentence; labels are assigned by first appearance in input order."""
    n = cos.shape[0]
    uf = _UnionFind(n)
    adj = (cos > p.tau1) & (sdiff <= p.tau2)
    for i, j in np.argwhere(np.triu(adj, k=1)):
        uf.union(int(i), int(j))
    labels: list[int] = []
    seen: dict[int, int] = {}
    for i in range(n):
        root = uf.find(i)
        if root not in seen:
            seen[root] = len(seen)
        labels.append(seen[root])
    return labels


def build_symbol_table(sentences: list[ScoredSentence], p: MatchParams) -> SymbolTable:
    """Symbol table for one event's sentences.

    Match-graph components (union-find over pairs with pair_similarity > 0)
    become symbols; glyphs are assigned in ascending symbol-id order from
    GLYPH_BLOCKS.  Empty input yields an empty table.
    """
    table = SymbolTable()
    if not sentences:
        return table
    cos, sdiff = match_matrices(sentences)
    labels = components_from_thresholds(cos, sdiff, p)
    for s, sym in zip(sentences, labels):
        table.symbol_of[s.key] = sym
        table.classes.setdefault(sym, []).append(s.key)
    for sym in sorted(table.classes):
        table.glyph_of[sym] = glyph_for(sym)
    return table
