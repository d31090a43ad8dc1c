"""Sentence segmentation matching the stylegraph corpus rules.

Reimplemented against the documented interface (not imported) so the
sidecar stays deployable on its own; parity with the main package is
pinned by a shared fixture in both test suites.

Rules: the cleaned title is sentence 0; the body splits at runs of
. ! ? that are followed by whitespace plus an uppercase letter (or end
of text), except when a '.' directly follows a listed abbreviation;
whitespace runs collapse to single spaces; sentences matching a junk
regex or shorter than two non-space characters are dropped.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

MIN_CHARS = 2
_WS = re.compile(r"\s+")
_ABBREV_TOKEN = re.compile(r"[A-Za-z][A-Za-z.]*$")


def load_lines(path: str | Path, lowercase: bool = False) -> list[str]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line.lower() if lowercase else line)
    return out


def read_corpus(path: str | Path) -> list[dict]:
    """Articles from a stylegraph corpus file, in file order."""
    articles = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc.msg}") from exc
            articles.append(rec)
    return articles


def _split_body(body: str, abbreviations: set[str]) -> list[str]:
    pieces = []
    start = 0
    i = 0
    n = len(body)
    while i < n:
        if body[i] in ".!?":
            j = i + 1
            while j < n and body[j] in ".!?":
                j += 1
            if _boundary(body, i, j, abbreviations):
                pieces.append(body[start:j])
                start = j
            i = j
        else:
            i += 1
    if start < n:
        pieces.append(body[start:])
    return pieces


def _boundary(body: str, run_start: int, run_end: int, abbreviations: set[str]) -> bool:
    if body[run_start] == ".":
        token = _ABBREV_TOKEN.search(body[:run_start])
        if token and token.group(0).lower() in abbreviations:
            return False
    k = run_end
    if k >= len(body):
        return True
    if not body[k].isspace():
        return False
    while k < len(body) and body[k].isspace():
        k += 1
    return k < len(body) and body[k].isupper()


def segment_article(
    title: str,
    body: str,
    junk_patterns: list[str],
    abbreviations: list[str],
) -> list[str]:
    """Cleaned sentences, title first, matching the main package's output."""
    junk = [re.compile(p) for p in junk_patterns]
    abbrevs = {a.lower() for a in abbreviations}

    def keep(text: str) -> bool:
        if len(text.replace(" ", "")) < MIN_CHARS:
            return False
        return not any(rx.search(text) for rx in junk)

    sentences = []
    cleaned_title = _WS.sub(" ", title or "").strip()
    if cleaned_title and keep(cleaned_title):
        sentences.append(cleaned_title)
    for piece in _split_body(body or "", abbrevs):
        text = _WS.sub(" ", piece).strip()
        if text and keep(text):
            sentences.append(text)
    return sentences
