"""Article- and domain-level similarity networks and their serialization.

The domain network is induced from the article network S through a
bipartite membership matrix A with entries 1/n_d (articles weighted
equally within their domain), as D = A^(1/2) S (A^(1/2))^T with the
square root taken elementwise.  That makes each domain pair a
pair-count-normalized aggregate:

    D[d,e] = sum(S[i,j] for i in d, j in e) / sqrt(n_d * n_e)

D's diagonal (within-domain reuse) is computed, stashed on the node as
the attribute ``self_similarity``, then zeroed for network analysis.

Exports are deterministic: nodes sorted by id, edges by (min id, max id),
weights with 6 decimals.  GraphML files can be read back with
read_graphml.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from xml.etree import ElementTree
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .article_sim import SimilarityMatrix
from .corpus import Article


@dataclass
class WeightedNetwork:
    """Undirected weighted graph: ordered node ids, per-node string
    attributes, symmetric nonnegative adjacency with zero diagonal."""

    node_ids: list[str]
    attributes: dict[str, dict[str, str]]
    adjacency: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.node_ids)
        if self.adjacency.shape != (n, n):
            raise ValueError(f"adjacency shape {self.adjacency.shape} != ({n}, {n})")
        if n:
            if not np.allclose(self.adjacency, self.adjacency.T, atol=1e-12):
                raise ValueError("adjacency not symmetric")
            if self.adjacency.min() < 0:
                raise ValueError("negative edge weight")
            if np.any(np.diag(self.adjacency) != 0.0):
                raise ValueError("self-loops not allowed")

    @property
    def n(self) -> int:
        return len(self.node_ids)

    def index_of(self, node_id: str) -> int:
        return self.node_ids.index(node_id)

    def edges(self) -> list[tuple[str, str, float]]:
        """(source, target, weight) for weight > 0, sorted by (min, max) id."""
        out = []
        for i, j in np.argwhere(np.triu(self.adjacency, k=1) > 0):
            a, b = self.node_ids[int(i)], self.node_ids[int(j)]
            if b < a:
                a, b = b, a
            out.append((a, b, float(self.adjacency[i, j])))
        return sorted(out)

    def degree(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def subgraph(self, keep: list[str]) -> "WeightedNetwork":
        idx = [self.node_ids.index(k) for k in keep]
        return WeightedNetwork(
            node_ids=list(keep),
            attributes={k: dict(self.attributes.get(k, {})) for k in keep},
            adjacency=self.adjacency[np.ix_(idx, idx)].copy(),
        )


@dataclass
class MembershipMatrix:
    """Domain-to-article bipartite weights; column i holds 1/n_d in the row
    of article i's domain and zero elsewhere."""

    domain_ids: list[str]
    article_ids: list[str]
    values: np.ndarray


def build_article_network(
    m: SimilarityMatrix, articles: list[Article], min_weight: float = 0.0
) -> WeightedNetwork:
    """Article network from a similarity matrix; keeps edges with weight
    strictly above min_weight and preserves isolates as nodes."""
    by_id = {a.id: a for a in articles}
    missing = [nid for nid in m.node_ids if nid not in by_id]
    if missing:
        raise ValueError(f"matrix ids not in article list: {missing}")
    adjacency = np.where(m.values > min_weight, m.values, 0.0)
    attributes = {}
    for nid in m.node_ids:
        art = by_id[nid]
        attrs = {"domain": art.domain}
        if art.bias_label is not None:
            attrs["bias_label"] = art.bias_label
        attributes[nid] = attrs
    return WeightedNetwork(node_ids=list(m.node_ids), attributes=attributes, adjacency=adjacency)


def membership_matrix(articles: list[Article], article_ids: list[str]) -> MembershipMatrix:
    """1/n_d membership over the given article ordering; domains sorted."""
    by_id = {a.id: a for a in articles}
    unknown = [nid for nid in article_ids if nid not in by_id]
    if unknown:
        raise ValueError(f"articles not in corpus: {unknown}")
    domains = sorted({by_id[nid].domain for nid in article_ids})
    counts = {d: sum(1 for nid in article_ids if by_id[nid].domain == d) for d in domains}
    values = np.zeros((len(domains), len(article_ids)))
    row = {d: i for i, d in enumerate(domains)}
    for j, nid in enumerate(article_ids):
        d = by_id[nid].domain
        values[row[d], j] = 1.0 / counts[d]
    return MembershipMatrix(domain_ids=domains, article_ids=list(article_ids), values=values)


def _domain_attributes(
    domains: list[str], articles_by_domain: dict[str, list[Article]], raw_diag: np.ndarray
) -> dict[str, dict[str, str]]:
    attributes: dict[str, dict[str, str]] = {}
    for i, d in enumerate(domains):
        attrs = {"self_similarity": f"{raw_diag[i]:.6f}"}
        labels = [a.bias_label for a in articles_by_domain[d] if a.bias_label is not None]
        if labels:
            # domains carry one bias label; tolerate disagreement by majority
            attrs["bias_label"] = max(sorted(set(labels)), key=labels.count)
        attributes[d] = attrs
    return attributes


def induce_domain_network(
    s: WeightedNetwork, membership: MembershipMatrix, articles: list[Article]
) -> WeightedNetwork:
    """Domain network D = A^(1/2) S (A^(1/2))^T with zeroed diagonal.

    Membership columns must cover exactly s's nodes (each in one domain).
    The raw diagonal lands on each node as attribute self_similarity.
    """
    if membership.article_ids != s.node_ids:
        raise ValueError("membership columns must match the article network's nodes")
    col_nonzeros = (membership.values > 0).sum(axis=0)
    if np.any(col_nonzeros != 1):
        bad = [membership.article_ids[j] for j in np.nonzero(col_nonzeros != 1)[0]]
        raise ValueError(f"articles must belong to exactly one domain: {bad}")
    half = np.sqrt(membership.values)
    d = half @ s.adjacency @ half.T
    raw_diag = np.diag(d).copy()
    np.fill_diagonal(d, 0.0)
    d = (d + d.T) / 2.0  # symmetrize away float noise
    by_domain: dict[str, list[Article]] = {dom: [] for dom in membership.domain_ids}
    by_id = {a.id: a for a in articles}
    for nid in membership.article_ids:
        by_domain[by_id[nid].domain].append(by_id[nid])
    attributes = _domain_attributes(membership.domain_ids, by_domain, raw_diag)
    return WeightedNetwork(
        node_ids=list(membership.domain_ids), attributes=attributes, adjacency=d
    )


def normalize_weights(net: WeightedNetwork) -> WeightedNetwork:
    """Scale all weights by the max entry (display normalization to [0,1])."""
    peak = net.adjacency.max() if net.n else 0.0
    adjacency = net.adjacency / peak if peak > 0 else net.adjacency.copy()
    return WeightedNetwork(
        node_ids=list(net.node_ids),
        attributes={k: dict(v) for k, v in net.attributes.items()},
        adjacency=adjacency,
    )


# --- serialization ----------------------------------------------------------


def export_network(net: WeightedNetwork, path: str | Path, fmt: str = "graphml") -> list[Path]:
    """Write a network to disk; returns the written paths.

    graphml: one file with node attributes and weighted undirected edges.
    edge_csv: "source,target,weight" rows plus a <stem>_nodes.csv sidecar
    with the node attributes.
    """
    path = Path(path)
    if fmt == "graphml":
        _write_graphml(net, path)
        return [path]
    if fmt == "edge_csv":
        stem = path.stem
        nodes_stem = stem[: -len("_edges")] + "_nodes" if stem.endswith("_edges") else stem + "_nodes"
        nodes_path = path.with_name(nodes_stem + path.suffix)
        _write_edge_csv(net, path, nodes_path)
        return [path, nodes_path]
    raise ValueError(f"unknown network format {fmt!r}")


def _attr_keys(net: WeightedNetwork) -> list[str]:
    keys: set[str] = set()
    for attrs in net.attributes.values():
        keys.update(attrs)
    return sorted(keys)


def _write_graphml(net: WeightedNetwork, path: Path) -> None:
    keys = _attr_keys(net)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
    ]
    for k in keys:
        lines.append(f'  <key id={quoteattr(k)} for="node" attr.name={quoteattr(k)} attr.type="string"/>')
    lines.append('  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>')
    lines.append('  <graph edgedefault="undirected">')
    for nid in sorted(net.node_ids):
        attrs = net.attributes.get(nid, {})
        if attrs:
            lines.append(f"    <node id={quoteattr(nid)}>")
            for k in sorted(attrs):
                lines.append(f"      <data key={quoteattr(k)}>{escape(attrs[k])}</data>")
            lines.append("    </node>")
        else:
            lines.append(f"    <node id={quoteattr(nid)}/>")
    for src, dst, w in net.edges():
        lines.append(f"    <edge source={quoteattr(src)} target={quoteattr(dst)}>")
        lines.append(f'      <data key="weight">{w!r}</data>')
        lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_edge_csv(net: WeightedNetwork, edges_path: Path, nodes_path: Path) -> None:
    with edges_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "weight"])
        for src, dst, w in net.edges():
            writer.writerow([src, dst, f"{w:.6f}"])
    keys = _attr_keys(net)
    with nodes_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id"] + keys)
        for nid in sorted(net.node_ids):
            attrs = net.attributes.get(nid, {})
            writer.writerow([nid] + [attrs.get(k, "") for k in keys])


def read_graphml(path: str | Path) -> WeightedNetwork:
    """Read a GraphML file written by export_network (or compatible)."""
    ns = {"g": "http://graphml.graphdrawing.org/xmlns"}
    root = ElementTree.parse(str(path)).getroot()
    key_names = {
        el.get("id"): el.get("attr.name", el.get("id")) for el in root.findall("g:key", ns)
    }
    graph = root.find("g:graph", ns)
    if graph is None:
        raise ValueError(f"{path}: no <graph> element")
    node_ids: list[str] = []
    attributes: dict[str, dict[str, str]] = {}
    for node in graph.findall("g:node", ns):
        nid = node.get("id")
        node_ids.append(nid)
        attrs = {}
        for data in node.findall("g:data", ns):
            attrs[key_names.get(data.get("key"), data.get("key"))] = data.text or ""
        attributes[nid] = attrs
    index = {nid: i for i, nid in enumerate(node_ids)}
    adjacency = np.zeros((len(node_ids), len(node_ids)))
    for edge in graph.findall("g:edge", ns):
        src, dst = edge.get("source"), edge.get("target")
        if src not in index or dst not in index:
            raise ValueError(f"{path}: edge references unknown node {src!r} or {dst!r}")
        weight = 1.0
        for data in edge.findall("g:data", ns):
            if key_names.get(data.get("key"), data.get("key")) == "weight":
                weight = float(data.text)
        adjacency[index[src], index[dst]] = weight
        adjacency[index[dst], index[src]] = weight
    return WeightedNetwork(node_ids=node_ids, attributes=attributes, adjacency=adjacency)
