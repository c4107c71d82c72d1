"""Exact k-nearest-neighbor search and weighted graph construction.

Distances are computed blockwise through the expansion
``|x - y|^2 = |x|^2 + |y|^2 - 2 x.y`` so the inner loop is a BLAS matrix
multiply. Inputs are float32; accumulation runs in float64, which keeps
the neighbor ordering stable against the tiny rounding differences that
would otherwise creep in between block sizes. Ties at equal distance
always resolve to the lower neighbor id.

Query rows are processed in independent blocks, parallelized with a
thread pool (BLAS is pinned to one thread inside the pool so the scaling
knob is the pool size). Each worker owns its output slice.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import ConfigError, DataFormatError

_COL_BLOCK = 4096


@dataclass(frozen=True)
class NeighborList:
    """Per-row exact nearest neighbors, sorted by (distance, neighbor id)."""

    indices: np.ndarray  # (n, k) int64, self excluded
    distances: np.ndarray  # (n, k) float64, L2

    @property
    def n_items(self) -> int:
        return self.indices.shape[0]

    @property
    def k(self) -> int:
        return self.indices.shape[1]


@dataclass(frozen=True)
class KnnGraph:
    """Undirected weighted graph with a canonical edge list and CSR adjacency.

    ``edge_u < edge_v`` everywhere and the (u, v) pairs are strictly
    increasing lexicographically; CSR arrays carry both directions.
    """

    n_nodes: int
    edge_u: np.ndarray  # int64
    edge_v: np.ndarray  # int64
    edge_w: np.ndarray  # float64, positive
    indptr: np.ndarray  # int64, len n_nodes + 1
    indices: np.ndarray  # int64
    weights: np.ndarray  # float64

    @classmethod
    def from_edges(cls, n_nodes: int, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> "KnnGraph":
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if (u == v).any():
            raise DataFormatError("self-loops are not allowed")
        if not np.isfinite(w).all() or (w <= 0).any():
            raise DataFormatError("edge weights must be positive and finite")
        a = np.minimum(u, v)
        b = np.maximum(u, v)
        order = np.lexsort((b, a))
        a, b, w = a[order], b[order], w[order]
        key = a * n_nodes + b
        if len(key) > 1 and (np.diff(key) == 0).any():
            raise DataFormatError("duplicate edges are not allowed")
        # CSR over both directions
        src = np.concatenate([a, b])
        dst = np.concatenate([b, a])
        ww = np.concatenate([w, w])
        csr_order = np.argsort(src, kind="stable")
        src, dst, ww = src[csr_order], dst[csr_order], ww[csr_order]
        indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n_nodes), out=indptr[1:])
        return cls(
            n_nodes=n_nodes,
            edge_u=a,
            edge_v=b,
            edge_w=w,
            indptr=indptr,
            indices=dst,
            weights=ww,
        )

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, node: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[node], self.indptr[node + 1]
        return self.indices[lo:hi], self.weights[lo:hi]


@dataclass(frozen=True)
class DegreeStats:
    min_degree: int
    max_degree: int
    mean_degree: float
    n_edges: int


def _merge_topk(run_d, run_i, new_d, new_i, k):
    """Keep the k smallest candidates by (distance, id), vectorized per row.

    Two stable argsorts implement the lexicographic order: sorting by id
    first, then stably by distance, leaves equal distances in ascending
    id order.
    """
    cand_d = np.concatenate([run_d, new_d], axis=1)
    cand_i = np.concatenate([run_i, new_i], axis=1)
    by_id = np.argsort(cand_i, axis=1, kind="stable")
    cand_d = np.take_along_axis(cand_d, by_id, axis=1)
    cand_i = np.take_along_axis(cand_i, by_id, axis=1)
    by_dist = np.argsort(cand_d, axis=1, kind="stable")[:, :k]
    return (
        np.take_along_axis(cand_d, by_dist, axis=1),
        np.take_along_axis(cand_i, by_dist, axis=1),
    )


def _block_topk(bd, col_start, k):
    """Select the k smallest entries per row of a distance block.

    argpartition alone breaks distance ties arbitrarily; rows where the
    k-th value is tied across the selection boundary are repaired so that
    lower column ids win.
    """
    bq, m = bd.shape
    if m <= k:
        idx = np.broadcast_to(np.arange(col_start, col_start + m), (bq, m))
        return bd, idx
    part = np.argpartition(bd, k - 1, axis=1)[:, :k]
    sel_d = np.take_along_axis(bd, part, axis=1)
    kth = sel_d.max(axis=1)
    n_lt = (bd < kth[:, None]).sum(axis=1)
    n_eq = (bd == kth[:, None]).sum(axis=1)
    for r in np.flatnonzero(n_lt + n_eq > k):
        row = bd[r]
        lt = np.flatnonzero(row < kth[r])
        eq = np.flatnonzero(row == kth[r])
        pick = np.concatenate([lt, eq[: k - lt.size]])
        part[r] = pick
        sel_d[r] = row[pick]
    return sel_d, part + col_start


def _search_block(x64, norms, q0, q1, k, out_d, out_i):
    n = x64.shape[0]
    q = x64[q0:q1]
    qn = norms[q0:q1]
    bq = q1 - q0
    run_d = np.full((bq, k), np.inf)
    run_i = np.full((bq, k), -1, dtype=np.int64)
    for c0 in range(0, n, _COL_BLOCK):
        c1 = min(n, c0 + _COL_BLOCK)
        bd = qn[:, None] + norms[c0:c1][None, :] - 2.0 * (q @ x64[c0:c1].T)
        np.maximum(bd, 0.0, out=bd)  # cancellation can leave tiny negatives
        lo, hi = max(q0, c0), min(q1, c1)
        if lo < hi:
            diag = np.arange(lo, hi)
            bd[diag - q0, diag - c0] = np.inf
        sel_d, sel_i = _block_topk(bd, c0, k)
        run_d, run_i = _merge_topk(run_d, run_i, sel_d, sel_i, k)
    out_d[q0:q1] = run_d
    out_i[q0:q1] = run_i


def knn_search(
    matrix: np.ndarray,
    k: int,
    block_size: int = 512,
    threads: int | None = None,
) -> NeighborList:
    """Exact k nearest neighbors of every row under L2 distance.

    ``block_size`` only tiles the query rows; the result is independent
    of it. ``threads`` is the worker-pool size (default: all cores).
    """
    matrix = np.ascontiguousarray(matrix, dtype=np.float32)
    n = matrix.shape[0]
    if not 1 <= k < n:
        raise ConfigError(f"k must satisfy 1 <= k < n_items, got k={k}, n_items={n}")
    if block_size < 1:
        raise ConfigError(f"block_size must be >= 1, got {block_size}")
    x64 = matrix.astype(np.float64)
    norms = np.einsum("ij,ij->i", x64, x64)
    out_d = np.empty((n, k))
    out_i = np.empty((n, k), dtype=np.int64)
    starts = range(0, n, block_size)
    with threadpool_limits(limits=1):
        if threads == 1 or n <= block_size:
            for q0 in starts:
                _search_block(x64, norms, q0, min(n, q0 + block_size), k, out_d, out_i)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(_search_block, x64, norms, q0, min(n, q0 + block_size), k, out_d, out_i)
                    for q0 in starts
                ]
                for f in futures:
                    f.result()
    return NeighborList(indices=out_i, distances=np.sqrt(out_d))


def nearest_centers(
    matrix: np.ndarray, centers: np.ndarray, block_size: int = 8192
) -> tuple[np.ndarray, np.ndarray]:
    """Assign each row to its nearest center by L2, ties to the lower index.

    Returns (assignment, squared distance to the assigned center). Shares
    the blocked square-norm expansion with :func:`knn_search`.
    """
    x = np.asarray(matrix, dtype=np.float64)
    c = np.asarray(centers, dtype=np.float64)
    if x.shape[1] != c.shape[1]:
        raise ConfigError(f"dimension mismatch: rows have {x.shape[1]}, centers have {c.shape[1]}")
    cn = np.einsum("ij,ij->i", c, c)
    assign = np.empty(x.shape[0], dtype=np.int64)
    d2 = np.empty(x.shape[0])
    for r0 in range(0, x.shape[0], block_size):
        r1 = min(x.shape[0], r0 + block_size)
        block = x[r0:r1]
        bn = np.einsum("ij,ij->i", block, block)
        bd = bn[:, None] + cn[None, :] - 2.0 * (block @ c.T)
        np.maximum(bd, 0.0, out=bd)
        assign[r0:r1] = np.argmin(bd, axis=1)
        d2[r0:r1] = bd[np.arange(r1 - r0), assign[r0:r1]]
    return assign, d2


def build_graph(
    neighbors: NeighborList,
    weighting: str = "gaussian",
    sigma: float | None = None,
) -> KnnGraph:
    """Symmetrize directed k-NN lists into an undirected weighted graph.

    Union symmetrization: {u, v} is an edge iff either occurs in the
    other's neighbor list, so degrees stay <= 2k. Weights per scheme:
    ``unit`` = 1, ``inverse-distance`` = 1/(1 + d^2), ``gaussian`` =
    exp(-d^2 / (2 sigma^2)) with sigma defaulting to the median neighbor
    distance. If both directions carry different distances the smaller
    one wins (cannot happen for exact L2, kept defensively).
    """
    n, k = neighbors.indices.shape
    u = np.repeat(np.arange(n, dtype=np.int64), k)
    v = neighbors.indices.ravel()
    d = neighbors.distances.ravel()
    a = np.minimum(u, v)
    b = np.maximum(u, v)
    order = np.lexsort((d, b, a))
    a, b, d = a[order], b[order], d[order]
    key = a * n + b
    first = np.ones(len(key), dtype=bool)
    first[1:] = key[1:] != key[:-1]
    a, b, d = a[first], b[first], d[first]  # min distance kept per pair

    if weighting == "unit":
        w = np.ones(len(d))
    elif weighting == "inverse-distance":
        w = 1.0 / (1.0 + d * d)
    elif weighting == "gaussian":
        if sigma is None:
            sigma = float(np.median(neighbors.distances))
        if sigma <= 0:
            sigma = 1.0  # degenerate all-zero distances
        w = np.exp(-(d * d) / (2.0 * sigma * sigma))
    else:
        raise ConfigError(f"unknown weighting scheme: {weighting!r}")
    if not np.isfinite(w).all() or (w <= 0).any():
        raise DataFormatError("weighting produced a non-positive or non-finite edge weight")
    return KnnGraph.from_edges(n, a, b, w)


def degree_stats(graph: KnnGraph) -> DegreeStats:
    deg = graph.degrees()
    return DegreeStats(
        min_degree=int(deg.min()) if len(deg) else 0,
        max_degree=int(deg.max()) if len(deg) else 0,
        mean_degree=float(deg.mean()) if len(deg) else 0.0,
        n_edges=graph.n_edges,
    )


def save_edgelist(graph: KnnGraph, path: str | Path) -> None:
    """Text edge list, one ``u v weight`` per line, nodes 0-indexed."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v, w in zip(graph.edge_u, graph.edge_v, graph.edge_w):
            fh.write(f"{u} {v} {float(w)!r}\n")


def load_edgelist(path: str | Path, n_nodes: int | None = None) -> KnnGraph:
    """Read a ``u v weight`` edge list; node count defaults to max id + 1."""
    us: list[int] = []
    vs: list[int] = []
    ws: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise DataFormatError(f"{path}:{lineno}: expected 'u v weight'")
            us.append(int(parts[0]))
            vs.append(int(parts[1]))
            ws.append(float(parts[2]))
    if not us:
        raise DataFormatError(f"{path}: empty edge list")
    if n_nodes is None:
        n_nodes = int(max(max(us), max(vs))) + 1
    return KnnGraph.from_edges(n_nodes, np.array(us), np.array(vs), np.array(ws))
