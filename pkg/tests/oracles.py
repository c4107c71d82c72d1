"""Independent reference implementations used to cross-check the engine.

Everything here is written the slow, obvious way on purpose: direct
coordinate differences instead of the square-norm expansion, per-pair
modularity sums instead of community accumulators, explicit loops
instead of contingency-table algebra. These stay independent of the
code paths they verify.
"""

import math
from itertools import combinations

import numpy as np


def naive_knn(x: np.ndarray, k: int):
    """Exact neighbors by direct per-row distance computation.

    One python loop over query rows; distances from coordinate
    differences (no dot-product expansion); full lexicographic sort on
    (distance, id).
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    ids = np.empty((n, k), dtype=np.int64)
    dists = np.empty((n, k))
    for i in range(n):
        d = np.sqrt(((x - x[i]) ** 2).sum(axis=1))
        d[i] = np.inf
        order = np.lexsort((np.arange(n), d))[:k]
        ids[i] = order
        dists[i] = d[order]
    return ids, dists


def brute_purity(pred, truth) -> float:
    pred = list(pred)
    truth = list(truth)
    total = 0
    for cluster in set(pred):
        members = [truth[i] for i in range(len(pred)) if pred[i] == cluster]
        best = max(members.count(cls) for cls in set(members))
        total += best
    return total / len(pred)


def brute_nmi(pred, truth) -> float:
    pred = list(pred)
    truth = list(truth)
    n = len(pred)
    joint_counts = {}
    pred_counts = {}
    true_counts = {}
    for a, b in zip(pred, truth):
        joint_counts[(a, b)] = joint_counts.get((a, b), 0) + 1
        pred_counts[a] = pred_counts.get(a, 0) + 1
        true_counts[b] = true_counts.get(b, 0) + 1

    def entropy(counts):
        return -sum((c / n) * math.log(c / n) for c in counts.values() if c > 0)

    h_pred = entropy(pred_counts)
    h_true = entropy(true_counts)
    if h_pred == 0.0 and h_true == 0.0:
        return 1.0
    if h_pred == 0.0 or h_true == 0.0:
        return 0.0
    mi = 0.0
    for (a, b), c in joint_counts.items():
        joint = c / n
        mi += joint * math.log(joint / ((pred_counts[a] / n) * (true_counts[b] / n)))
    return mi / ((h_pred + h_true) / 2.0)


def adjacency_from_graph(graph) -> np.ndarray:
    a = np.zeros((graph.n_nodes, graph.n_nodes))
    for u, v, w in zip(graph.edge_u, graph.edge_v, graph.edge_w):
        a[u, v] += w
        a[v, u] += w
    return a


def modularity_dense(adjacency: np.ndarray, comm, gamma: float = 1.0) -> float:
    """Per-pair modularity sum over the dense adjacency matrix."""
    comm = np.asarray(comm)
    k = adjacency.sum(axis=1)
    two_m = adjacency.sum()
    q = 0.0
    n = len(comm)
    for i in range(n):
        for j in range(n):
            if comm[i] == comm[j]:
                q += adjacency[i, j] - gamma * k[i] * k[j] / two_m
    return q / two_m


def all_partitions(n: int):
    """Every set partition of range(n) as an assignment vector."""

    def rec(i, assignment, n_used):
        if i == n:
            yield tuple(assignment)
            return
        for c in range(n_used + 1):
            assignment.append(c)
            yield from rec(i + 1, assignment, max(n_used, c + 1))
            assignment.pop()

    yield from rec(0, [], 0)


def count_intra_inter_edges(graph, labels):
    labels = np.asarray(labels)
    intra = int((labels[graph.edge_u] == labels[graph.edge_v]).sum())
    return intra, graph.n_edges - intra


def count_bigrams(texts, tokenize_fn):
    """Global bigram counts over a list of texts."""
    counts = {}
    for text in texts:
        toks = tokenize_fn(text)
        for a, b in zip(toks, toks[1:]):
            key = f"{a} {b}"
            counts[key] = counts.get(key, 0) + 1
    return counts
