"""Comparison harness: how different text-similarity measures react to
controlled single-sentence alterations (typos, rephrasing, quote framing,
word swaps, translation, ...).

Suites are line-delimited JSON {name, base, altered}; the report is a CSV
with one row per case.  Numeric columns are emitted for manual
inspection; tests assert only booleans, identities, and orderings since
absolute values depend on the embedding model.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from pathlib import Path

from .article_sim import levenshtein
from .corpus import _normalize_ws
from .providers import EmbeddingProvider, ProviderError, SentimentScorer, cosine

_WORD_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class AlterationCase:
    name: str
    base: str
    altered: str


@dataclass(frozen=True)
class ComparisonRow:
    case_name: str
    exact_match: bool
    jaccard: float
    levenshtein_ratio: float
    sentence_cosine: float
    token_vector_cosine: float | None
    sentiment_diff: float


def load_alteration_suite(path: str | Path) -> list[AlterationCase]:
    cases = []
    seen = set()
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            name = rec["name"]
            if name in seen:
                raise ValueError(f"{path}: line {lineno}: duplicate case name {name!r}")
            seen.add(name)
            cases.append(AlterationCase(name=name, base=rec["base"], altered=rec["altered"]))
    return cases


def preprocess_tokens(text: str, stopwords: set[str], pronouns: set[str]) -> list[str]:
    """Lowercase, strip punctuation, drop stopwords and pronouns, keep order."""
    tokens = _WORD_RE.findall(text.lower().replace("'", ""))
    return [t for t in tokens if t not in stopwords and t not in pronouns]


def _jaccard(a: set[str], b: set[str]) -> float:
    union = a | b
    if not union:
        return 1.0  # two empty token sets are identical
    return len(a & b) / len(union)


def _token_vector_cosine(
    provider: EmbeddingProvider, tokens_a: list[str], tokens_b: list[str]
) -> float | None:
    if not tokens_a or not tokens_b:
        return None
    try:
        vecs_a = provider.embed_batch(tokens_a)
        vecs_b = provider.embed_batch(tokens_b)
    except ProviderError:
        return None  # provider has no token mode (e.g. sentence-keyed file)
    return cosine(vecs_a.mean(axis=0), vecs_b.mean(axis=0))


def compare_all(
    case: AlterationCase,
    provider: EmbeddingProvider,
    scorer: SentimentScorer,
    stopwords: set[str],
    pronouns: set[str],
) -> ComparisonRow:
    """All comparison measures for one base/altered pair."""
    tokens_a = preprocess_tokens(case.base, stopwords, pronouns)
    tokens_b = preprocess_tokens(case.altered, stopwords, pronouns)
    longest = max(len(case.base), len(case.altered))
    lev_ratio = 1.0 - levenshtein(case.base, case.altered) / longest if longest else 1.0
    emb = provider.embed_batch([case.base, case.altered])
    return ComparisonRow(
        case_name=case.name,
        exact_match=_normalize_ws(case.base) == _normalize_ws(case.altered),
        jaccard=_jaccard(set(tokens_a), set(tokens_b)),
        levenshtein_ratio=lev_ratio,
        sentence_cosine=cosine(emb[0], emb[1]),
        token_vector_cosine=_token_vector_cosine(provider, tokens_a, tokens_b),
        sentiment_diff=abs(scorer.score(case.base) - scorer.score(case.altered)),
    )


def run_suite(
    cases: list[AlterationCase],
    provider: EmbeddingProvider,
    scorer: SentimentScorer,
    stopwords: set[str],
    pronouns: set[str],
) -> list[ComparisonRow]:
    return [compare_all(c, provider, scorer, stopwords, pronouns) for c in cases]


def write_report(rows: list[ComparisonRow], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "case_name",
                "exact_match",
                "jaccard",
                "levenshtein_ratio",
                "sentence_cosine",
                "token_vector_cosine",
                "sentiment_diff",
            ]
        )
        for row in rows:
            writer.writerow(
                [
                    row.case_name,
                    str(row.exact_match).lower(),
                    f"{row.jaccard:.6f}",
                    f"{row.levenshtein_ratio:.6f}",
                    f"{row.sentence_cosine:.6f}",
                    "" if row.token_vector_cosine is None else f"{row.token_vector_cosine:.6f}",
                    f"{row.sentiment_diff:.6f}",
                ]
            )
