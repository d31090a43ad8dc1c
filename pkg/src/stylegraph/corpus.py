"""Corpus ingestion: event-tagged articles, text cleaning, sentence segmentation.

Corpus files are UTF-8 line-delimited JSON, one article per line with keys
``id``, ``domain``, ``event_id``, ``title``, ``body``, ``bias_label``
(nullable) and ``url`` (nullable).  Junk-pattern files hold one regex per
line ("#" starts a comment); abbreviation files hold one lowercase token
per line (dots allowed, e.g. "u.s").
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

DEFAULT_BIAS_LEVELS = (
    "far-left",
    "left",
    "left-center",
    "center",
    "right-center",
    "right",
    "far-right",
)

# Fragments shorter than this (non-whitespace chars) are dropped after cleaning.
MIN_SENTENCE_CHARS = 2

_WS_RE = re.compile(r"\s+")
_TERMINATORS = ".!?"


class CorpusError(ValueError):
    """Malformed corpus file or record."""


@dataclass(frozen=True)
class BiasScale:
    """Ordered bias labels, most-left first."""

    levels: tuple[str, ...] = DEFAULT_BIAS_LEVELS

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("bias scale needs at least one level")
        if len(set(self.levels)) != len(self.levels):
            raise ValueError("bias scale levels must be unique")

    def index(self, label: str) -> int:
        return self.levels.index(label)

    def __contains__(self, label: str) -> bool:
        return label in self.levels


@dataclass(frozen=True)
class Article:
    id: str
    domain: str
    event_id: str
    title: str
    body: str
    bias_label: str | None = None
    url: str | None = None


@dataclass(frozen=True)
class SentenceRecord:
    article_id: str
    index: int  # 0 is the title sentence when the title survives cleaning
    text: str


def load_corpus(path: str | Path, scale: BiasScale = BiasScale()) -> dict[str, list[Article]]:
    """Parse a line-delimited corpus file into articles grouped by event id.

    Raises CorpusError on unparseable lines (with line number), duplicate
    article ids, unknown bias labels, or records violating the article
    invariants.
    """
    path = Path(path)
    events: dict[str, list[Article]] = {}
    seen_ids: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {lineno}: not valid JSON ({exc.msg})") from exc
            if not isinstance(rec, dict):
                raise CorpusError(f"{path}: line {lineno}: record is not an object")
            missing = [k for k in ("id", "domain", "event_id", "title", "body") if k not in rec]
            if missing:
                raise CorpusError(f"{path}: line {lineno}: missing keys {missing}")
            art_id = str(rec["id"])
            if art_id in seen_ids:
                raise CorpusError(f"{path}: line {lineno}: duplicate article id {art_id!r}")
            seen_ids.add(art_id)
            event_id = str(rec["event_id"])
            if not event_id:
                raise CorpusError(f"{path}: line {lineno}: empty event_id for article {art_id!r}")
            title = str(rec["title"] or "")
            body = str(rec["body"] or "")
            if not title.strip() and not body.strip():
                raise CorpusError(f"{path}: line {lineno}: article {art_id!r} has neither title nor body")
            bias = rec.get("bias_label")
            if bias is not None and bias not in scale:
                raise CorpusError(
                    f"{path}: line {lineno}: unknown bias label {bias!r} for article {art_id!r}"
                )
            article = Article(
                id=art_id,
                domain=str(rec["domain"]),
                event_id=event_id,
                title=title,
                body=body,
                bias_label=bias,
                url=rec.get("url"),
            )
            events.setdefault(event_id, []).append(article)
    return events


def load_patterns(path: str | Path) -> list[str]:
    """Read one regex per line, skipping blanks and '#' comments."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def load_wordlist(path: str | Path) -> list[str]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def _normalize_ws(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def _preceding_abbreviation(body: str, dot_pos: int, abbrevs: set[str]) -> bool:
    # Token immediately before the '.', letters and internal dots ("U.S" for "U.S.").
    m = re.search(r"[A-Za-z][A-Za-z.]*$", body[:dot_pos])
    return bool(m) and m.group(0).lower() in abbrevs


def _is_boundary(body: str, run_start: int, run_end: int, abbrevs: set[str]) -> bool:
    if body[run_start] == "." and _preceding_abbreviation(body, run_start, abbrevs):
        return False
    k = run_end
    if k >= len(body):
        return True
    if not body[k].isspace():
        return False
    while k < len(body) and body[k].isspace():
        k += 1
    return k < len(body) and body[k].isupper()


def _split_sentences(body: str, abbrevs: set[str]) -> list[str]:
    """Split at . ! ? runs followed by whitespace+uppercase or end of text."""
    pieces: list[str] = []
    start = 0
    i = 0
    n = len(body)
    while i < n:
        if body[i] in _TERMINATORS:
            j = i + 1
            while j < n and body[j] in _TERMINATORS:
                j += 1
            if _is_boundary(body, i, j, abbrevs):
                pieces.append(body[start:j])
                start = j
            i = j
        else:
            i += 1
    if start < n:
        pieces.append(body[start:])
    return pieces


def clean_and_segment(
    article: Article,
    junk_patterns: list[str],
    abbreviations: list[str],
) -> list[SentenceRecord]:
    """Clean an article into sentence records; the title (when it survives
    cleaning) becomes index 0 and body sentences follow in order.

    Junk-matching sentences and fragments shorter than MIN_SENTENCE_CHARS
    non-whitespace characters are dropped; whitespace runs collapse to one
    space.  Raises ValueError on invalid junk patterns.
    """
    compiled = []
    for pat in junk_patterns:
        try:
            compiled.append(re.compile(pat))
        except re.error as exc:
            raise ValueError(f"invalid junk pattern {pat!r}: {exc}") from exc
    abbrevs = {a.lower() for a in abbreviations}

    def keep(text: str) -> bool:
        if len(text.replace(" ", "")) < MIN_SENTENCE_CHARS:
            return False
        return not any(rx.search(text) for rx in compiled)

    sentences: list[str] = []
    title = _normalize_ws(article.title)
    if title and keep(title):
        sentences.append(title)
    for piece in _split_sentences(article.body, abbrevs):
        text = _normalize_ws(piece)
        if text and keep(text):
            sentences.append(text)
    return [
        SentenceRecord(article_id=article.id, index=i, text=text)
        for i, text in enumerate(sentences)
    ]
