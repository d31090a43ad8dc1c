import hashlib
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[2]
SHARED_FIXTURES = REPO / "tests" / "fixtures"
PRIMARY_DATA = REPO / "src" / "stylegraph" / "data"


class StubEncoder:
    """Deterministic hash-based encoder for protocol tests (no model)."""

    def __init__(self, dim: int = 16, loaded: bool = True):
        self.name = "stub-encoder"
        self.dim = dim
        self.loaded = loaded

    def load(self):
        self.loaded = True

    def encode(self, texts):
        out = []
        for text in texts:
            vec = [0.0] * self.dim
            padded = text.lower()
            grams = [padded[i : i + 3] for i in range(len(padded) - 2)] or [padded]
            for gram in grams:
                digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
                bucket = int.from_bytes(digest[:4], "big") % self.dim
                vec[bucket] += 1.0 if digest[4] % 2 == 0 else -1.0
            norm = sum(v * v for v in vec) ** 0.5 or 1.0
            out.append([v / norm for v in vec])
        return out


@pytest.fixture()
def stub_encoder():
    return StubEncoder()
