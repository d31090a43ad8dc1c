"""Embedding providers and the lexicon-rule sentiment scorer.

Three interchangeable embedding backends share one contract
(`name`, `dim`, `embed_batch(texts) -> (n, dim) array`):

* ToyEmbeddingProvider - deterministic trigram-hash vectors, no model needed.
* FileEmbeddingProvider - precomputed vectors keyed by sha256 of the text.
* HttpEmbeddingProvider - client for the embedding sidecar service.

Vector files are line-delimited JSON: a header record
``{"dim": D, "provider": NAME}`` followed by ``{"sha256": HEX, "vector": [...]}``
records.  Lexicon files are tab-separated ``term<TAB>valence`` lines.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np
import requests


class ProviderError(RuntimeError):
    """Embedding backend unavailable or missing a requested vector."""


class EmbeddingProvider(Protocol):
    name: str
    dim: int

    def embed_batch(self, texts: list[str]) -> np.ndarray: ...


def text_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity clamped to [-1, 1]; raises on dimension mismatch."""
    if a.shape != b.shape:
        raise ValueError(f"embedding dim mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("zero-norm embedding")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def toy_embed(text: str, dim: int, seed: int = 0) -> np.ndarray:
    """Deterministic embedding from hashed character trigrams.

    Lowercased trigram counts are scattered into `dim` buckets (bucket and
    sign from a keyed blake2b digest, so results are stable across
    processes) and L2-normalized.  Texts shorter than 3 chars hash as a
    single gram.
    """
    if dim < 8:
        raise ValueError("toy embedding dim must be >= 8")
    t = text.lower()
    grams = [t[i : i + 3] for i in range(len(t) - 2)] if len(t) >= 3 else [t]
    key = str(seed).encode("utf-8")
    vec = np.zeros(dim, dtype=float)
    for gram in grams:
        digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8, key=key).digest()
        bucket = int.from_bytes(digest[:4], "big") % dim
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        vec[bucket] += sign
    norm = np.linalg.norm(vec)
    if norm == 0.0:  # opposite-signed grams cancelled; keep norm > 0
        vec[0] = 1.0
        norm = 1.0
    return vec / norm


class ToyEmbeddingProvider:
    """Test/offline provider built on toy_embed."""

    def __init__(self, dim: int = 64, seed: int = 0):
        if dim < 8:
            raise ValueError("toy embedding dim must be >= 8")
        self.dim = int(dim)
        self.seed = int(seed)
        self.name = f"toy-{self.dim}-{self.seed}"

    def embed_batch(self, texts: list[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        return np.stack([toy_embed(t, self.dim, self.seed) for t in texts])


class FileEmbeddingProvider:
    """Precomputed vectors loaded from a vector file, keyed by text sha256."""

    def __init__(self, path: str | Path):
        path = Path(path)
        if not path.exists():
            raise ProviderError(f"vector file not found: {path}")
        self._vectors: dict[str, np.ndarray] = {}
        self.dim = 0
        self.name = f"file:{path.name}"
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ProviderError(f"{path}: line {lineno}: bad record ({exc.msg})") from exc
                if "dim" in rec:  # header
                    self.dim = int(rec["dim"])
                    if rec.get("provider"):
                        self.name = str(rec["provider"])
                    continue
                vec = np.asarray(rec["vector"], dtype=float)
                self._vectors[rec["sha256"]] = vec
                if self.dim == 0:
                    self.dim = vec.shape[0]
        if self.dim == 0:
            raise ProviderError(f"vector file has no header and no records: {path}")

    def embed_batch(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim))
        for i, text in enumerate(texts):
            key = text_sha256(text)
            vec = self._vectors.get(key)
            if vec is None:
                raise ProviderError(f"no stored vector for text hash {key}")
            if vec.shape[0] != self.dim:
                raise ProviderError(f"vector for hash {key} has dim {vec.shape[0]}, expected {self.dim}")
            out[i] = vec
        return out


class HttpEmbeddingProvider:
    """Client for the embedding sidecar (POST /embed, GET /health)."""

    def __init__(self, base_url: str, timeout: float = 30.0, batch_size: int = 256):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.batch_size = batch_size
        self._session = requests.Session()
        try:
            resp = self._session.get(f"{self.base_url}/health", timeout=timeout)
        except requests.RequestException as exc:
            raise ProviderError(f"embedding service unreachable at {self.base_url}: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderError(f"embedding service not ready: HTTP {resp.status_code}")
        info = resp.json()
        self.name = str(info.get("model", "http"))
        self.dim = int(info["dim"])

    def embed_batch(self, texts: list[str]) -> np.ndarray:
        chunks = []
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start : start + self.batch_size]
            try:
                resp = self._session.post(
                    f"{self.base_url}/embed", json={"texts": batch}, timeout=self.timeout
                )
            except requests.RequestException as exc:
                raise ProviderError(f"embed request failed: {exc}") from exc
            if resp.status_code != 200:
                raise ProviderError(f"embed request failed: HTTP {resp.status_code}")
            payload = resp.json()
            vecs = np.asarray(payload["vectors"], dtype=float)
            if vecs.shape != (len(batch), self.dim):
                raise ProviderError(
                    f"embed response shape {vecs.shape} != ({len(batch)}, {self.dim})"
                )
            chunks.append(vecs)
        if not chunks:
            return np.zeros((0, self.dim))
        return np.vstack(chunks)


def write_vector_file(
    path: str | Path,
    dim: int,
    provider_name: str,
    items: Iterable[tuple[str, np.ndarray]],
) -> int:
    """Write a vector file for FileEmbeddingProvider; returns record count."""
    count = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"dim": dim, "provider": provider_name}) + "\n")
        for text, vec in items:
            rec = {"sha256": text_sha256(text), "vector": [float(v) for v in vec]}
            fh.write(json.dumps(rec) + "\n")
            count += 1
    return count


# --- sentiment -------------------------------------------------------------

NEGATIONS = frozenset(
    """not no never neither nor nothing nowhere cannot hardly barely scarcely
    isn't wasn't aren't weren't don't doesn't didn't won't wouldn't can't
    couldn't shouldn't ain't""".split()
)

_TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z']*")
_QUOTE_CHARS = '"“”'


@dataclass(frozen=True)
class SentimentRules:
    """Rule constants; defaults follow the published VADER values."""

    negation_damp: float = 0.74
    caps_boost: float = 1.25
    exclaim_boost: float = 0.292
    quote_damp: float = 0.5
    alpha: float = 15.0
    negation_window: int = 3


def load_lexicon(path: str | Path) -> dict[str, float]:
    """Read a term<TAB>valence lexicon file."""
    lex: dict[str, float] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ValueError(f"{path}: line {lineno}: expected term<TAB>valence")
        lex[parts[0].strip().lower()] = float(parts[1])
    return lex


class SentimentScorer:
    """Compound sentiment in [-1, 1] from a valence lexicon plus rules.

    Rules applied per sentiment token: ALL-CAPS boost (when the whole text
    is not caps), sign flip + damping for a negation within the preceding
    window, half weight inside double quotes.  Trailing "!" (up to 3) each
    push the raw sum away from zero; the sum is normalized by
    x / sqrt(x^2 + alpha).
    """

    def __init__(
        self,
        lexicon: dict[str, float],
        rules: SentimentRules = SentimentRules(),
        negations: frozenset[str] = NEGATIONS,
    ):
        if not lexicon:
            raise ValueError("empty sentiment lexicon")
        self.lexicon = {k.lower(): float(v) for k, v in lexicon.items()}
        self.rules = rules
        self.negations = negations

    def score(self, text: str) -> float:
        tokens: list[tuple[str, bool]] = []  # (token, inside-quotes)
        quote_count = 0
        last_end = 0
        for m in _TOKEN_RE.finditer(text):
            quote_count += sum(text.count(q, last_end, m.start()) for q in _QUOTE_CHARS)
            last_end = m.end()
            tokens.append((m.group(0), quote_count % 2 == 1))
        alpha_tokens = [t for t, _ in tokens if len(t) > 1]
        text_all_caps = bool(alpha_tokens) and all(t.isupper() for t in alpha_tokens)

        r = self.rules
        x = 0.0
        for i, (tok, quoted) in enumerate(tokens):
            valence = self.lexicon.get(tok.lower())
            if valence is None:
                continue
            if tok.isupper() and len(tok) > 1 and not text_all_caps:
                valence *= r.caps_boost
            window = tokens[max(0, i - r.negation_window) : i]
            if any(w.lower() in self.negations for w, _ in window):
                valence = -valence * r.negation_damp
            if quoted:
                valence *= r.quote_damp
            x += valence

        stripped = text.rstrip()
        bangs = min(len(stripped) - len(stripped.rstrip("!")), 3)
        if x > 0:
            x += bangs * r.exclaim_boost
        elif x < 0:
            x -= bangs * r.exclaim_boost
        return x / math.sqrt(x * x + r.alpha)
