"""Precompute a vector file for offline stylegraph runs.

Reads a corpus file, segments every article with the shared rules,
embeds each unique sentence once, and writes the vector-file format the
stylegraph file provider loads: a JSON header line {"dim", "provider"}
followed by {"sha256", "vector"} records sorted by hash.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources
from pathlib import Path

from .encoders import SentenceTransformerEncoder
from .segmentation import load_lines, read_corpus, segment_article


def _data(name: str) -> Path:
    return Path(str(resources.files("embed_sidecar.data") / name))


def text_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def unique_sentences(corpus_path, junk_patterns, abbreviations) -> dict[str, str]:
    """sha256 -> sentence text for every cleaned sentence in the corpus."""
    texts: dict[str, str] = {}
    for rec in read_corpus(corpus_path):
        for text in segment_article(
            rec.get("title", ""), rec.get("body", ""), junk_patterns, abbreviations
        ):
            texts[text_sha256(text)] = text
    return texts


def precompute(corpus_path, out_path, encoder, junk_patterns, abbreviations, batch_size=64) -> int:
    """Write the vector file; returns the number of vectors written."""
    texts = unique_sentences(corpus_path, junk_patterns, abbreviations)
    ordered = [texts[h] for h in sorted(texts)]
    vectors: list[list[float]] = []
    for start in range(0, len(ordered), batch_size):
        vectors.extend(encoder.encode(ordered[start : start + batch_size]))
    with Path(out_path).open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"dim": encoder.dim, "provider": encoder.name}) + "\n")
        for text, vec in zip(ordered, vectors):
            fh.write(json.dumps({"sha256": text_sha256(text), "vector": vec}) + "\n")
    return len(ordered)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="precompute sentence vectors for a corpus")
    parser.add_argument("--corpus", required=True, type=Path)
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument("--model", default=None, help="sentence-transformers model name")
    parser.add_argument("--junk-patterns", type=Path, default=_data("junk_patterns.txt"))
    parser.add_argument("--abbreviations", type=Path, default=_data("abbreviations.txt"))
    parser.add_argument("--batch-size", type=int, default=64)
    args = parser.parse_args(argv)

    encoder = SentenceTransformerEncoder(args.model)
    encoder.load()
    count = precompute(
        args.corpus,
        args.out,
        encoder,
        load_lines(args.junk_patterns),
        load_lines(args.abbreviations, lowercase=True),
        batch_size=args.batch_size,
    )
    print(f"wrote {count} vectors ({encoder.name}, dim {encoder.dim}) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
