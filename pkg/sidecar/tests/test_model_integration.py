"""Integration tests that need the real sentence encoder; they skip
cleanly when the model cannot be loaded (offline environments)."""

import json

import pytest
from fastapi.testclient import TestClient

from embed_sidecar.encoders import SentenceTransformerEncoder
from embed_sidecar.service import create_app

from conftest import PRIMARY_DATA


@pytest.fixture(scope="module")
def model_client():
    encoder = SentenceTransformerEncoder()
    try:
        encoder.load()
    except Exception as exc:
        pytest.skip(f"default model unavailable: {exc}")
    return TestClient(create_app(encoder))


def load_cases():
    cases = {}
    for line in (PRIMARY_DATA / "alterations.jsonl").read_text(encoding="utf-8").splitlines():
        rec = json.loads(line)
        cases[rec["name"]] = rec
    return cases


def cosine(a, b):
    num = sum(x * y for x, y in zip(a, b))
    den = (sum(x * x for x in a) ** 0.5) * (sum(y * y for y in b) ** 0.5)
    return num / den


def test_rephrasing_beats_unrelated(model_client):
    cases = load_cases()
    base = cases["rephrasing"]["base"]
    texts = [base, cases["rephrasing"]["altered"], cases["unrelated"]["altered"]]
    body = model_client.post("/embed", json={"texts": texts}).json()
    vec_base, vec_rephrase, vec_unrelated = body["vectors"]
    assert cosine(vec_base, vec_rephrase) > cosine(vec_base, vec_unrelated)


def test_model_reports_dim(model_client):
    health = model_client.get("/health").json()
    assert health["dim"] > 0
    body = model_client.post("/embed", json={"texts": ["hello world"]}).json()
    assert len(body["vectors"][0]) == health["dim"]
