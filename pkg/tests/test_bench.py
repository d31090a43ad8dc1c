import pytest

from stylegraph.bench import (
    compare_all,
    AlterationCase,
    load_alteration_suite,
    preprocess_tokens,
    run_suite,
    write_report,
)
from stylegraph.config import data_path
from stylegraph.corpus import load_wordlist
from stylegraph.providers import FileEmbeddingProvider, write_vector_file, toy_embed


@pytest.fixture(scope="module")
def wordsets():
    stopwords = set(load_wordlist(data_path("stopwords.txt")))
    pronouns = set(load_wordlist(data_path("pronouns.txt")))
    return stopwords, pronouns


@pytest.fixture(scope="module")
def suite():
    return load_alteration_suite(data_path("alterations.jsonl"))


def test_preprocess_basic():
    assert preprocess_tokens("The cat sat!", {"the"}, set()) == ["cat", "sat"]


def test_preprocess_all_stopwords():
    assert preprocess_tokens("the a an", {"the", "a", "an"}, set()) == []


def test_preprocess_drops_pronouns():
    assert preprocess_tokens("He runs fast", set(), {"he"}) == ["runs", "fast"]


def test_preprocess_strips_punctuation_and_case():
    assert preprocess_tokens('Said: "REFUSED," twice.', set(), set()) == ["said", "refused", "twice"]


def test_suite_has_thirteen_unique_cases(suite):
    assert len(suite) == 13
    assert len({c.name for c in suite}) == 13
    assert {"formatting typo", "inserted punctuation", "foreign language"} <= {c.name for c in suite}


def test_identity_control(suite, toy_provider, scorer, wordsets):
    base = suite[0].base
    case = AlterationCase(name="identity", base=base, altered=base)
    row = compare_all(case, toy_provider, scorer, *wordsets)
    assert row.exact_match is True
    assert row.jaccard == 1.0
    assert row.levenshtein_ratio == 1.0
    assert row.sentence_cosine == pytest.approx(1.0, abs=1e-9)
    assert row.sentiment_diff == 0.0


def test_all_shipped_cases_not_exact_matches(suite, toy_provider, scorer, wordsets):
    rows = run_suite(suite, toy_provider, scorer, *wordsets)
    assert all(not r.exact_match for r in rows)


def test_inserted_punctuation_jaccard_one(suite, toy_provider, scorer, wordsets):
    rows = {r.case_name: r for r in run_suite(suite, toy_provider, scorer, *wordsets)}
    assert rows["inserted punctuation"].jaccard == 1.0


def test_formatting_typo_sentiment_zero(suite, toy_provider, scorer, wordsets):
    rows = {r.case_name: r for r in run_suite(suite, toy_provider, scorer, *wordsets)}
    assert rows["formatting typo"].sentiment_diff == 0.0


def test_quote_framing_shifts_sentiment(suite, toy_provider, scorer, wordsets):
    rows = {r.case_name: r for r in run_suite(suite, toy_provider, scorer, *wordsets)}
    assert rows["framing with quotes"].sentiment_diff > 0.0
    assert rows["simple word change"].sentiment_diff > 0.0
    assert rows["complex word change"].sentiment_diff > 0.0


def test_ranges_hold_for_all_rows(suite, toy_provider, scorer, wordsets):
    for row in run_suite(suite, toy_provider, scorer, *wordsets):
        assert 0.0 <= row.jaccard <= 1.0
        assert 0.0 <= row.levenshtein_ratio <= 1.0
        assert -1.0 <= row.sentence_cosine <= 1.0
        assert 0.0 <= row.sentiment_diff <= 2.0
        if row.token_vector_cosine is not None:
            assert -1.0 <= row.token_vector_cosine <= 1.0


def test_token_vector_cosine_omitted_without_token_mode(tmp_path, suite, scorer, wordsets):
    # a file provider that only knows the full sentences has no token mode
    texts = {suite[0].base, suite[0].altered}
    path = tmp_path / "v.jsonl"
    write_vector_file(path, 16, "sentences-only", ((t, toy_embed(t, 16, 0)) for t in texts))
    provider = FileEmbeddingProvider(path)
    row = compare_all(suite[0], provider, scorer, *wordsets)
    assert row.token_vector_cosine is None
    assert row.sentence_cosine == pytest.approx(1.0, abs=0.2)  # near-identical sentences


def test_write_report_shape(tmp_path, suite, toy_provider, scorer, wordsets):
    rows = run_suite(suite, toy_provider, scorer, *wordsets)
    out = tmp_path / "report.csv"
    write_report(rows, out)
    lines = out.read_text().splitlines()
    assert len(lines) == 14  # header + 13 cases
    assert lines[0].startswith("case_name,exact_match,jaccard")


def test_duplicate_case_names_rejected(tmp_path):
    path = tmp_path / "suite.jsonl"
    path.write_text(
        '{"name": "x", "base": "a", "altered": "b"}\n{"name": "x", "base": "c", "altered": "d"}\n'
    )
    with pytest.raises(ValueError, match="duplicate"):
        load_alteration_suite(path)
