from pathlib import Path

import pytest

from stylegraph.config import data_path
from stylegraph.providers import SentimentScorer, ToyEmbeddingProvider, load_lexicon

REPO = Path(__file__).resolve().parents[1]
FIXTURES = Path(__file__).resolve().parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def mini_corpus_path() -> Path:
    return data_path("mini_corpus.jsonl")


@pytest.fixture(scope="session")
def toy_provider() -> ToyEmbeddingProvider:
    return ToyEmbeddingProvider(dim=64, seed=0)


@pytest.fixture(scope="session")
def scorer() -> SentimentScorer:
    return SentimentScorer(load_lexicon(data_path("lexicon.tsv")))
