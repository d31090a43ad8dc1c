"""Sentence encoder wrappers.

An encoder exposes `name`, `dim`, `load()` and `encode(texts)`; `dim` is
only valid after load().  The default model is a multilingual sentence
transformer, configurable via EMBED_SIDECAR_MODEL.
"""

from __future__ import annotations

import os

DEFAULT_MODEL = "sentence-transformers/distiluse-base-multilingual-cased-v2"
ENV_MODEL = "EMBED_SIDECAR_MODEL"


class EncoderError(RuntimeError):
    pass


class SentenceTransformerEncoder:
    """Lazy wrapper around a sentence-transformers model."""

    def __init__(self, model_name: str | None = None):
        self.name = model_name or os.environ.get(ENV_MODEL, DEFAULT_MODEL)
        self.dim = 0
        self._model = None

    @property
    def loaded(self) -> bool:
        return self._model is not None

    def load(self) -> None:
        if self._model is not None:
            return
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderError("sentence-transformers is not installed") from exc
        try:
            self._model = SentenceTransformer(self.name)
        except Exception as exc:
            raise EncoderError(f"could not load model {self.name!r}: {exc}") from exc
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> list[list[float]]:
        if self._model is None:
            raise EncoderError("model not loaded")
        vectors = self._model.encode(list(texts), convert_to_numpy=True, show_progress_bar=False)
        return [[float(v) for v in row] for row in vectors]
