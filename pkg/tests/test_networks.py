import itertools
import random

import numpy as np
import pytest

from stylegraph.article_sim import SimilarityMatrix
from stylegraph.corpus import Article
from stylegraph.networks import (
    WeightedNetwork,
    build_article_network,
    export_network,
    induce_domain_network,
    membership_matrix,
    normalize_weights,
    read_graphml,
)


def make_article(aid, domain, bias=None):
    return Article(id=aid, domain=domain, event_id="e", title=f"t {aid}", body="b.", bias_label=bias)


def sim_matrix(ids, pairs):
    n = len(ids)
    values = np.zeros((n, n))
    index = {a: i for i, a in enumerate(ids)}
    for a, b, w in pairs:
        values[index[a], index[b]] = values[index[b], index[a]] = w
    return SimilarityMatrix(node_ids=list(ids), values=values)


def brute_force_domain_weights(s_values, article_domains, domains):
    """Oracle: D[d,e] = sum over article pairs / sqrt(n_d * n_e), zero diagonal."""
    counts = {d: sum(1 for x in article_domains if x == d) for d in domains}
    n = len(domains)
    out = np.zeros((n, n))
    for di, d in enumerate(domains):
        for ei, e in enumerate(domains):
            if di == ei:
                continue
            total = 0.0
            for i, da in enumerate(article_domains):
                for j, db in enumerate(article_domains):
                    if da == d and db == e:
                        total += s_values[i, j]
            out[di, ei] = total / np.sqrt(counts[d] * counts[e])
    return out


def test_network_keeps_isolates_and_filters_by_min_weight():
    arts = [make_article(a, f"d{a}") for a in ("a", "b", "c")]
    m = sim_matrix(["a", "b", "c"], [("a", "b", 0.6), ("b", "c", 0.4)])
    net = build_article_network(m, arts, min_weight=0.5)
    assert len(net.edges()) == 1
    assert net.node_ids == ["a", "b", "c"]  # "c" kept as isolate
    zero = build_article_network(sim_matrix(["a", "b", "c"], []), arts)
    assert zero.edges() == []
    assert zero.n == 3


def test_network_single_positive_pair():
    arts = [make_article("a", "d1", "left"), make_article("b", "d2", "right")]
    net = build_article_network(sim_matrix(["a", "b"], [("a", "b", 0.3)]), arts)
    assert net.edges() == [("a", "b", 0.3)]
    assert net.attributes["a"]["bias_label"] == "left"
    assert net.attributes["a"]["domain"] == "d1"


def test_network_id_mismatch():
    arts = [make_article("a", "d1")]
    with pytest.raises(ValueError, match="matrix ids"):
        build_article_network(sim_matrix(["a", "zz"], []), arts)


def test_membership_matrix_one_domain_per_article():
    arts = [make_article("a1", "x"), make_article("a2", "x"), make_article("b1", "y")]
    m = membership_matrix(arts, ["a1", "a2", "b1"])
    assert m.domain_ids == ["x", "y"]
    col_sums = (m.values > 0).sum(axis=0)
    assert np.all(col_sums == 1)
    assert m.values[0, 0] == pytest.approx(0.5)  # 1/n_d for |x| = 2
    assert m.values[1, 2] == pytest.approx(1.0)


def test_domain_network_single_article_domains_equals_renamed_s():
    arts = [make_article("a", "dx"), make_article("b", "dy")]
    m = sim_matrix(["a", "b"], [("a", "b", 0.7)])
    s = build_article_network(m, arts)
    d = induce_domain_network(s, membership_matrix(arts, s.node_ids), arts)
    assert d.node_ids == ["dx", "dy"]
    assert d.adjacency[0, 1] == pytest.approx(0.7)


def test_domain_network_hand_computed_example():
    # X={a1,a2}, Y={b1}; S(a1,b1)=0.8, S(a2,b1)=0.4, S(a1,a2)=1.0
    arts = [make_article("a1", "X"), make_article("a2", "X"), make_article("b1", "Y")]
    m = sim_matrix(["a1", "a2", "b1"], [("a1", "b1", 0.8), ("a2", "b1", 0.4), ("a1", "a2", 1.0)])
    s = build_article_network(m, arts)
    d = induce_domain_network(s, membership_matrix(arts, s.node_ids), arts)
    assert d.adjacency[d.index_of("X"), d.index_of("Y")] == pytest.approx(1.2 / np.sqrt(2), abs=1e-12)
    # raw within-domain reuse kept as a node attribute before the diagonal is zeroed
    assert float(d.attributes["X"]["self_similarity"]) == pytest.approx(1.0, abs=1e-6)
    assert np.all(np.diag(d.adjacency) == 0.0)


def test_domain_network_zero_s_gives_zero_d():
    arts = [make_article("a", "dx"), make_article("b", "dy"), make_article("c", "dx")]
    s = build_article_network(sim_matrix(["a", "b", "c"], []), arts)
    d = induce_domain_network(s, membership_matrix(arts, s.node_ids), arts)
    assert np.all(d.adjacency == 0.0)


def test_domain_network_single_domain_degenerates():
    arts = [make_article("a", "only"), make_article("b", "only")]
    s = build_article_network(sim_matrix(["a", "b"], [("a", "b", 0.9)]), arts)
    d = induce_domain_network(s, membership_matrix(arts, s.node_ids), arts)
    assert d.node_ids == ["only"]
    assert d.adjacency.shape == (1, 1)
    assert d.adjacency[0, 0] == 0.0


def test_domain_network_membership_must_cover_articles():
    arts = [make_article("a", "dx"), make_article("b", "dy")]
    s = build_article_network(sim_matrix(["a", "b"], []), arts)
    m = membership_matrix(arts, ["a", "b"])
    m.article_ids = ["a"]  # corrupt coverage
    with pytest.raises(ValueError, match="must match"):
        induce_domain_network(s, m, arts)


def test_domain_network_against_brute_force_oracle():
    rng = random.Random(77)
    for trial in range(50):
        n_articles = rng.randint(2, 20)
        n_domains = rng.randint(1, 6)
        domains = [f"d{k}" for k in range(n_domains)]
        article_domains = [rng.choice(domains) for _ in range(n_articles)]
        present = sorted(set(article_domains))
        arts = [make_article(f"a{i}", article_domains[i]) for i in range(n_articles)]
        values = np.zeros((n_articles, n_articles))
        for i, j in itertools.combinations(range(n_articles), 2):
            if rng.random() < 0.5:
                values[i, j] = values[j, i] = round(rng.random(), 6)
        m = SimilarityMatrix(node_ids=[a.id for a in arts], values=values)
        s = build_article_network(m, arts)
        d = induce_domain_network(s, membership_matrix(arts, s.node_ids), arts)
        oracle = brute_force_domain_weights(values, article_domains, present)
        assert d.node_ids == present
        assert np.allclose(d.adjacency, oracle, atol=1e-9)
        assert np.allclose(d.adjacency, d.adjacency.T, atol=1e-12)
        assert d.adjacency.min() >= 0.0


def test_normalize_weights_display_scaling():
    net = WeightedNetwork(
        node_ids=["a", "b", "c"],
        attributes={n: {} for n in "abc"},
        adjacency=np.array([[0.0, 2.0, 0.0], [2.0, 0.0, 0.5], [0.0, 0.5, 0.0]]),
    )
    scaled = normalize_weights(net)
    assert scaled.adjacency.max() == 1.0
    assert scaled.adjacency[1, 2] == pytest.approx(0.25)


def test_export_edge_csv_row_count(tmp_path):
    arts = [make_article("a", "d1"), make_article("b", "d2")]
    net = build_article_network(sim_matrix(["a", "b"], [("a", "b", 0.5)]), arts)
    paths = export_network(net, tmp_path / "net_edges.csv", "edge_csv")
    lines = paths[0].read_text().splitlines()
    assert lines == ["source,target,weight", "a,b,0.500000"]
    nodes = paths[1].read_text().splitlines()
    assert nodes[0] == "node_id,domain"
    assert paths[1].name == "net_nodes.csv"


def test_export_deterministic(tmp_path):
    rng = random.Random(7)
    ids = [f"n{i}" for i in range(8)]
    values = np.zeros((8, 8))
    for i, j in itertools.combinations(range(8), 2):
        if rng.random() < 0.4:
            values[i, j] = values[j, i] = round(rng.random(), 4)
    arts = [make_article(i, f"d{i}", "center") for i in ids]
    net = build_article_network(SimilarityMatrix(node_ids=ids, values=values), arts)
    for fmt, name in (("graphml", "a.graphml"), ("edge_csv", "a_edges.csv")):
        p1 = export_network(net, tmp_path / name, fmt)
        first = [p.read_bytes() for p in p1]
        p2 = export_network(net, tmp_path / name, fmt)
        assert [p.read_bytes() for p in p2] == first


def test_graphml_round_trip(tmp_path):
    arts = [
        make_article("a", "d1", "left"),
        make_article("b", "d2", "right"),
        make_article("c", "d3"),
    ]
    m = sim_matrix(["a", "b", "c"], [("a", "b", 0.125), ("b", "c", 0.8)])
    net = build_article_network(m, arts)
    path = tmp_path / "net.graphml"
    export_network(net, path, "graphml")
    loaded = read_graphml(path)
    assert loaded.node_ids == sorted(net.node_ids)
    for nid in net.node_ids:
        assert loaded.attributes[nid] == net.attributes[nid]
    for i, a in enumerate(net.node_ids):
        for j, b in enumerate(net.node_ids):
            li, lj = loaded.node_ids.index(a), loaded.node_ids.index(b)
            assert loaded.adjacency[li, lj] == net.adjacency[i, j]


def test_weighted_network_validation():
    with pytest.raises(ValueError, match="symmetric"):
        WeightedNetwork(["a", "b"], {}, np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(ValueError, match="self-loops"):
        WeightedNetwork(["a"], {}, np.array([[1.0]]))
    with pytest.raises(ValueError, match="negative"):
        WeightedNetwork(["a", "b"], {}, np.array([[0.0, -1.0], [-1.0, 0.0]]))
