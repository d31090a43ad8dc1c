import json
import math
import random
import string
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from stylegraph.providers import (
    FileEmbeddingProvider,
    HttpEmbeddingProvider,
    ProviderError,
    SentimentScorer,
    ToyEmbeddingProvider,
    cosine,
    load_lexicon,
    text_sha256,
    toy_embed,
    write_vector_file,
)


# --- toy embedder -----------------------------------------------------------


def test_toy_embed_deterministic():
    a = toy_embed("abc", 16, 0)
    b = toy_embed("abc", 16, 0)
    assert np.array_equal(a, b)


def test_toy_embed_self_cosine_is_one():
    v = toy_embed("the cat sat", 64, 0)
    assert abs(cosine(v, v) - 1.0) < 1e-9


def test_toy_embed_shared_trigrams_order_cosines():
    a = toy_embed("the cat sat", 64, 0)
    near = toy_embed("the cat sat down", 64, 0)
    far = toy_embed("stock market crash", 64, 0)
    assert cosine(a, far) < cosine(a, near)


def test_toy_embed_seed_changes_vectors():
    assert not np.array_equal(toy_embed("abc def", 64, 0), toy_embed("abc def", 64, 1))


def test_toy_embed_unit_norm_even_for_short_text():
    for text in ["", "a", "ab", "xyz"]:
        v = toy_embed(text, 16, 0)
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12


def test_toy_embed_rejects_small_dim():
    with pytest.raises(ValueError):
        toy_embed("abc", 4, 0)


def test_batch_invariance_toy():
    provider = ToyEmbeddingProvider(dim=32, seed=1)
    rng = random.Random(7)
    texts = [
        "".join(rng.choice(string.ascii_lowercase + " ") for _ in range(rng.randint(1, 40)))
        for _ in range(30)
    ]
    whole = provider.embed_batch(texts)
    split = np.vstack([provider.embed_batch(texts[:11]), provider.embed_batch(texts[11:])])
    assert np.array_equal(whole, split)


# --- file provider ----------------------------------------------------------


def test_file_provider_round_trip(tmp_path):
    provider = ToyEmbeddingProvider(dim=16, seed=0)
    texts = ["alpha beta", "gamma delta", "epsilon"]
    vecs = provider.embed_batch(texts)
    path = tmp_path / "vectors.jsonl"
    write_vector_file(path, 16, provider.name, zip(texts, vecs))

    loaded = FileEmbeddingProvider(path)
    assert loaded.dim == 16
    assert loaded.name == provider.name
    out = loaded.embed_batch(["gamma delta", "alpha beta", "gamma delta"])
    assert np.array_equal(out[0], vecs[1])
    assert np.array_equal(out[1], vecs[0])
    assert np.array_equal(out[0], out[2])


def test_file_provider_missing_key_names_hash(tmp_path):
    path = tmp_path / "vectors.jsonl"
    write_vector_file(path, 16, "t", [("known", toy_embed("known", 16, 0))])
    provider = FileEmbeddingProvider(path)
    missing = text_sha256("unknown text")
    with pytest.raises(ProviderError, match=missing):
        provider.embed_batch(["unknown text"])


def test_file_provider_missing_file():
    with pytest.raises(ProviderError, match="not found"):
        FileEmbeddingProvider("/nonexistent/vectors.jsonl")


# --- http provider ----------------------------------------------------------


class _StubHandler(BaseHTTPRequestHandler):
    dim = 12

    def log_message(self, *args):
        pass

    def do_GET(self):
        if self.path == "/health":
            body = json.dumps({"status": "ok", "model": "stub-model", "dim": self.dim}).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.end_headers()
            self.wfile.write(body)
        else:
            self.send_response(404)
            self.end_headers()

    def do_POST(self):
        if self.path != "/embed":
            self.send_response(404)
            self.end_headers()
            return
        length = int(self.headers["Content-Length"])
        payload = json.loads(self.rfile.read(length))
        vectors = [list(toy_embed(t, self.dim, 99)) for t in payload["texts"]]
        body = json.dumps({"vectors": vectors, "dim": self.dim}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture()
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_http_provider_embeds_and_batches(stub_server):
    provider = HttpEmbeddingProvider(stub_server, batch_size=2)
    assert provider.name == "stub-model"
    assert provider.dim == 12
    texts = ["one", "two", "three", "four", "five"]
    out = provider.embed_batch(texts)
    assert out.shape == (5, 12)
    # chunked calls must agree with direct toy computation (batch invariance)
    expected = np.stack([toy_embed(t, 12, 99) for t in texts])
    assert np.allclose(out, expected)


def test_http_provider_unreachable():
    with pytest.raises(ProviderError, match="unreachable"):
        HttpEmbeddingProvider("http://127.0.0.1:9", timeout=0.2)


# --- sentiment --------------------------------------------------------------


def test_empty_lexicon_rejected():
    with pytest.raises(ValueError):
        SentimentScorer({})


def test_no_lexicon_tokens_scores_zero():
    s = SentimentScorer({"good": 1.9})
    assert s.score("completely neutral words only") == 0.0


def test_single_token_matches_normalization():
    s = SentimentScorer({"good": 1.9})
    assert s.score("good") == pytest.approx(1.9 / math.sqrt(1.9**2 + 15), abs=1e-12)
    assert s.score("good") == pytest.approx(0.4404, abs=1e-4)


def test_negation_flips_and_dampens():
    s = SentimentScorer({"good": 1.9})
    x = -1.9 * 0.74
    assert s.score("not good") == pytest.approx(x / math.sqrt(x * x + 15), abs=1e-12)
    assert s.score("not good") < 0


def test_negation_window_is_three_tokens():
    s = SentimentScorer({"good": 1.9})
    assert s.score("not quite that good") < 0  # negation 3 tokens back
    assert s.score("not sure at all but good") > 0  # negation out of window


def test_allcaps_boost_only_when_text_mixed_case():
    s = SentimentScorer({"good": 1.9})
    mixed = s.score("this is GOOD")
    plain = s.score("this is good")
    assert mixed > plain
    shouting = s.score("THIS IS GOOD")
    assert shouting == pytest.approx(plain, abs=1e-12)


def test_exclamations_amplify_up_to_three():
    s = SentimentScorer({"good": 1.9})
    base = s.score("good")
    one = s.score("good!")
    three = s.score("good!!!")
    four = s.score("good!!!!")
    assert base < one < three
    assert three == pytest.approx(four, abs=1e-12)
    # sign symmetry: exclamations push negative sums further negative
    assert s.score("not good!!") < s.score("not good")


def test_exclamation_alone_scores_zero():
    s = SentimentScorer({"good": 1.9})
    assert s.score("whatever!!!") == 0.0


def test_quoted_token_half_weight():
    s = SentimentScorer({"refused": -1.3})
    quoted = s.score('they "refused" the offer')
    plain = s.score("they refused the offer")
    assert plain < quoted < 0


def test_antisymmetric_lexicons_negate():
    pos = SentimentScorer({"good": 1.9})
    neg = SentimentScorer({"bad": -1.9})
    assert pos.score("good") == pytest.approx(-neg.score("bad"), abs=1e-12)


def test_compound_bounded_fuzz():
    lex = {"good": 3.9, "bad": -3.9, "wild": 2.2, "grim": -2.5}
    s = SentimentScorer(lex)
    rng = random.Random(123)
    vocab = list(lex) + ["not", "the", "very", "plain", "words", "HERE"]
    for _ in range(500):
        text = " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 30)))
        text += "!" * rng.randint(0, 5)
        assert -1.0 <= s.score(text) <= 1.0


def test_sentiment_deterministic(scorer):
    text = 'Officials "praised" the EXCELLENT response, but critics refused to agree!!'
    assert scorer.score(text) == scorer.score(text)


def test_load_lexicon(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text("good\t1.9\nBAD\t-2.5\n# comment\n", encoding="utf-8")
    lex = load_lexicon(path)
    assert lex == {"good": 1.9, "bad": -2.5}
    bad = tmp_path / "bad.tsv"
    bad.write_text("no-tab-here\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_lexicon(bad)


def test_cosine_dim_mismatch():
    with pytest.raises(ValueError, match="dim"):
        cosine(np.ones(4), np.ones(5))
