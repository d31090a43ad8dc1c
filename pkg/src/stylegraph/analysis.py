"""Network clustering and its evaluation against bias labels.

Louvain is implemented directly (rather than via a library) because the
pipeline needs reproducible output: the canonical pass visits nodes in
ascending id order, equal-gain moves resolve to the lowest candidate
cluster id, and cycles stop once a full pass gains less than 1e-9
modularity.  A fixed number of seed-shuffled visit orders are also
explored (greedy local moving is order-sensitive on small graphs) and
the best-quality partition wins, so output is deterministic for a fixed
seed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .corpus import BiasScale
from .networks import WeightedNetwork

GAIN_EPS = 1e-9


@dataclass(frozen=True)
class Partition:
    """Node id -> cluster id."""

    assignment: dict[str, int]

    def cluster_count(self) -> int:
        return len(set(self.assignment.values()))

    def restrict(self, nodes: list[str]) -> "Partition":
        return Partition({n: self.assignment[n] for n in nodes})

@dataclass(frozen=True)
class EvaluationReport:
    event_id: str
    level: str  # "article" | "domain"
    ari: float
    label_modularity: float | None
    cluster_count: int
    node_count: int
    excluded_count: int


def _partition_quality(w: np.ndarray, comm: np.ndarray, resolution: float) -> float:
    """Modularity from per-community aggregates (internal bookkeeping form):
    sum_c [ intra_c/2m - resolution * (K_c/2m)^2 ]."""
    two_m = w.sum()
    q = 0.0
    for c in np.unique(comm):
        mask = comm == c
        intra = w[np.ix_(mask, mask)].sum()
        k_c = w[mask].sum()
        q += intra / two_m - resolution * (k_c / two_m) ** 2
    return float(q)


def _local_move(w: np.ndarray, resolution: float, comm: np.ndarray, order: list[int]) -> bool:
    """One Louvain phase of repeated single-node moves; mutates comm.

    Returns True if any node moved.  Gains use the standard detached-node
    form; candidate communities are scanned in ascending id so ties go to
    the lowest cluster id.  A node may also split off into an empty
    community, but only on strict improvement over every other option.
    """
    n = w.shape[0]
    k = w.sum(axis=1)
    two_m = w.sum()
    comm_degree = np.zeros(n)
    comm_size = np.zeros(n, dtype=int)
    for i in range(n):
        comm_degree[comm[i]] += k[i]
        comm_size[comm[i]] += 1
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = int(comm[i])
            w_to: dict[int, float] = {}
            for j in np.nonzero(w[i])[0]:
                if j != i:
                    c = int(comm[j])
                    w_to[c] = w_to.get(c, 0.0) + w[i, j]
            comm_degree[ci] -= k[i]
            comm_size[ci] -= 1

            def gain(c: int) -> float:
                # up to the shared 2/2m factor
                return w_to.get(c, 0.0) - resolution * k[i] * comm_degree[c] / two_m

            stay = gain(ci)
            best_c, best_gain = ci, stay
            for c in sorted(w_to):
                if c == ci:
                    continue
                g = gain(c)
                if g > best_gain:
                    best_c, best_gain = c, g
            if comm_size[ci] > 0 and 0.0 > best_gain:
                # isolation into a fresh community (gain 0); strict > keeps
                # the lowest-cluster-id rule for real-community ties
                empties = np.nonzero(comm_size == 0)[0]
                if empties.size:
                    best_c, best_gain = int(empties[0]), 0.0
            if best_c != ci and 2.0 * (best_gain - stay) / two_m > GAIN_EPS:
                comm[i] = best_c
                comm_degree[best_c] += k[i]
                comm_size[best_c] += 1
                improved = True
                moved_any = True
            else:
                comm_degree[ci] += k[i]
                comm_size[ci] += 1
    return moved_any


def _compress(comm: np.ndarray) -> np.ndarray:
    mapping: dict[int, int] = {}
    out = np.empty_like(comm)
    for i, c in enumerate(comm):
        if c not in mapping:
            mapping[c] = len(mapping)
        out[i] = mapping[c]
    return out


def _aggregate(w: np.ndarray, comm: np.ndarray, k: int) -> np.ndarray:
    b = np.zeros((w.shape[0], k))
    b[np.arange(w.shape[0]), comm] = 1.0
    return b.T @ w @ b


def _one_hierarchy(
    w0: np.ndarray, resolution: float, init: np.ndarray, order0: list[int]
) -> np.ndarray:
    """One full local-move + aggregate cascade starting from partition init."""
    comm = init.copy()
    _local_move(w0, resolution, comm, order0)
    assignment = _compress(comm)
    k = int(assignment.max()) + 1
    if k == w0.shape[0]:
        return assignment
    w = _aggregate(w0, assignment, k)
    while True:
        comm = np.arange(w.shape[0])
        moved = _local_move(w, resolution, comm, list(range(w.shape[0])))
        comm = _compress(comm)
        assignment = comm[assignment]
        k = int(comm.max()) + 1
        if not moved or k == w.shape[0]:
            return assignment
        w = _aggregate(w, comm, k)


def _run_cycles(
    w0: np.ndarray, resolution: float, init: np.ndarray, order0: list[int]
) -> tuple[np.ndarray, float]:
    """Repeat hierarchy cascades (each one refines the last flat partition)
    until a full cycle gains no more than GAIN_EPS modularity."""
    assignment = _compress(init)
    quality = _partition_quality(w0, assignment, resolution)
    while True:
        candidate = _one_hierarchy(w0, resolution, assignment, order0)
        new_quality = _partition_quality(w0, candidate, resolution)
        if new_quality - quality <= GAIN_EPS:
            return assignment, quality
        assignment, quality = candidate, new_quality


# Greedy local moving is order- and start-sensitive on small graphs, so a
# bounded set of seed-derived visit orders and coarse random starting
# partitions is explored alongside the canonical run (ascending order,
# all-singletons start); best modularity wins, canonical run keeps ties.
_EXPLORATION_ORDERS = 4
_EXPLORATION_STARTS = 8


def louvain(net: WeightedNetwork, resolution: float = 1.0, seed: int = 0) -> Partition:
    """Two-phase weighted Louvain; deterministic for a fixed seed.

    Isolates end up in singleton clusters; an edgeless network returns all
    singletons.  Cluster ids are contiguous from 0 in node order.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    n = net.n
    if n == 0:
        return Partition({})
    w0 = net.adjacency.astype(float).copy()
    if w0.sum() <= 0.0:
        return Partition({nid: i for i, nid in enumerate(net.node_ids)})
    rng = random.Random(seed)
    orders = [list(range(n))]
    orders += [rng.sample(range(n), n) for _ in range(_EXPLORATION_ORDERS)]
    starts = [np.arange(n)]
    for _ in range(_EXPLORATION_STARTS):
        parts = rng.randint(2, max(2, n // 2))
        starts.append(np.array([rng.randrange(parts) for _ in range(n)]))
    best_assignment: np.ndarray | None = None
    best_quality = -math.inf
    for order in orders:
        for start in starts:
            assignment, quality = _run_cycles(w0, resolution, start, order)
            if quality > best_quality + GAIN_EPS:
                best_assignment, best_quality = assignment, quality
    final = _compress(best_assignment)
    return Partition({nid: int(final[i]) for i, nid in enumerate(net.node_ids)})


def modularity(net: WeightedNetwork, p: Partition, resolution: float = 1.0) -> float:
    """Q by the direct double sum over the weighted adjacency."""
    missing = [nid for nid in net.node_ids if nid not in p.assignment]
    if missing:
        raise ValueError(f"partition does not cover nodes: {missing}")
    w = net.adjacency
    two_m = w.sum()
    if two_m <= 0.0:
        raise ValueError("modularity undefined for zero total weight")
    k = w.sum(axis=1)
    labels = np.array([p.assignment[nid] for nid in net.node_ids])
    same = labels[:, None] == labels[None, :]
    null = np.outer(k, k) / two_m
    return float(((w - resolution * null) * same).sum() / two_m)


def adjusted_rand_index(p1: Partition, p2: Partition) -> float:
    """Chance-corrected partition agreement (exact integer arithmetic).

    Both-trivial degenerate cases (singletons vs singletons, one cluster
    vs one cluster) return 1.0.
    """
    if set(p1.assignment) != set(p2.assignment):
        raise ValueError("partitions cover different node sets")
    nodes = sorted(p1.assignment)
    n = len(nodes)
    if n == 0:
        return 1.0
    table: dict[tuple[int, int], int] = {}
    for node in nodes:
        key = (p1.assignment[node], p2.assignment[node])
        table[key] = table.get(key, 0) + 1
    a: dict[int, int] = {}
    b: dict[int, int] = {}
    for (c1, c2), cnt in table.items():
        a[c1] = a.get(c1, 0) + cnt
        b[c2] = b.get(c2, 0) + cnt
    sum_nij = sum(math.comb(cnt, 2) for cnt in table.values())
    sum_a = sum(math.comb(cnt, 2) for cnt in a.values())
    sum_b = sum(math.comb(cnt, 2) for cnt in b.values())
    binom_n = math.comb(n, 2)
    # ari = (sum_nij - sum_a*sum_b/binom_n) / ((sum_a+sum_b)/2 - sum_a*sum_b/binom_n),
    # cleared of denominators so the arithmetic stays in integers
    numer = 2 * (binom_n * sum_nij - sum_a * sum_b)
    denom = binom_n * (sum_a + sum_b) - 2 * sum_a * sum_b
    if denom == 0:
        return 1.0
    return numer / denom


def bias_partition(net: WeightedNetwork, scale: BiasScale) -> Partition:
    """Partition of the labeled nodes with cluster id = label's scale index.

    Nodes without a bias_label attribute are left out; callers count them
    as exclusions.
    """
    assignment = {}
    for nid in net.node_ids:
        label = net.attributes.get(nid, {}).get("bias_label")
        if label:
            assignment[nid] = scale.index(label)
    return Partition(assignment)


def evaluate_partition(
    net: WeightedNetwork,
    clusters: Partition,
    scale: BiasScale,
    event_id: str,
    level: str,
) -> EvaluationReport:
    """Compare an existing clustering against the network's bias labels.

    ARI and label modularity run on the labeled subgraph only; unlabeled
    nodes are counted in excluded_count.  label_modularity is None when
    the labeled subgraph has no edge weight.
    """
    labeled = bias_partition(net, scale)
    labeled_nodes = [nid for nid in net.node_ids if nid in labeled.assignment]
    excluded = net.n - len(labeled_nodes)
    if labeled_nodes:
        ari = adjusted_rand_index(clusters.restrict(labeled_nodes), labeled)
        sub = net.subgraph(labeled_nodes)
        try:
            label_q = modularity(sub, labeled.restrict(labeled_nodes))
        except ValueError:
            label_q = None
    else:
        ari = 0.0
        label_q = None
    return EvaluationReport(
        event_id=event_id,
        level=level,
        ari=ari,
        label_modularity=label_q,
        cluster_count=clusters.cluster_count(),
        node_count=net.n,
        excluded_count=excluded,
    )


def evaluate_network(
    net: WeightedNetwork,
    scale: BiasScale,
    event_id: str,
    level: str,
    resolution: float = 1.0,
    seed: int = 0,
) -> tuple[EvaluationReport, Partition]:
    """Cluster a network with louvain, then evaluate_partition it."""
    clusters = louvain(net, resolution=resolution, seed=seed)
    return evaluate_partition(net, clusters, scale, event_id, level), clusters


def coassociation_matrix(
    per_event: list[tuple[str, Partition]], domains: list[str]
) -> np.ndarray:
    """Fraction of events in which each domain pair shares a cluster.

    Domains absent from an event count as fresh singletons there, so they
    co-associate with nothing in that event.
    """
    n = len(domains)
    m = np.zeros((n, n))
    for _, part in per_event:
        labels: dict[str, int] = {}
        fresh = max(part.assignment.values(), default=-1) + 1
        for d in domains:
            if d in part.assignment:
                labels[d] = part.assignment[d]
            else:
                labels[d] = fresh
                fresh += 1
        for i, di in enumerate(domains):
            for j in range(i + 1, n):
                if labels[di] == labels[domains[j]]:
                    m[i, j] += 1
                    m[j, i] += 1
    m /= len(per_event)
    return m


def ensemble_clusters(
    per_event: list[tuple[str, Partition]],
    all_domains: set[str],
    resolution: float = 1.0,
    seed: int = 0,
) -> Partition:
    """Consensus partition across events via co-association + Louvain."""
    if len(per_event) < 2:
        raise ValueError("ensembling needs at least two events")
    if not all_domains:
        raise ValueError("empty domain set")
    domains = sorted(all_domains)
    m = coassociation_matrix(per_event, domains)
    net = WeightedNetwork(node_ids=domains, attributes={d: {} for d in domains}, adjacency=m)
    return louvain(net, resolution=resolution, seed=seed)
