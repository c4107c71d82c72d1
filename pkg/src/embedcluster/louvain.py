"""Multi-level modularity optimization over weighted undirected graphs.

Standard greedy scheme: sweep nodes in a seeded-shuffled order, moving
each to the neighboring community with the largest strictly positive
modularity gain; when a sweep makes no move, contract communities into a
weighted super-graph and repeat. The local-move phase is sequential by
design (the gain bookkeeping depends on prior moves) and runs as a
compiled kernel; contraction is vectorized.

Internal convention: each level keeps an edge list (u < v, no loops)
plus a per-node self-loop array holding adjacency-matrix diagonal values
(twice the collapsed internal weight), so degrees, total weight and
modularity read directly off the arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ConfigError
from .knn import KnnGraph
from .partition import Partition


@dataclass(frozen=True)
class _LevelGraph:
    """One coarsening level: canonical edges plus diagonal self-weights."""

    n_nodes: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray
    loops: np.ndarray  # diagonal values, 2x internal weight

    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edge_u, weights=self.edge_w, minlength=self.n_nodes)
        deg += np.bincount(self.edge_v, weights=self.edge_w, minlength=self.n_nodes)
        return deg + self.loops


@dataclass(frozen=True)
class MoveLog:
    """Accepted local moves of one pass, in execution order."""

    nodes: np.ndarray
    from_comm: np.ndarray
    to_comm: np.ndarray
    gains: np.ndarray


@dataclass(frozen=True)
class LouvainResult:
    final: Partition
    levels: list[Partition]  # over original node ids, coarsest last
    modularity_trace: np.ndarray
    n_passes: int
    # populated only with track_moves=True, for gain-consistency checks
    move_logs: list[MoveLog] | None = field(default=None, repr=False)
    level_graphs: list[_LevelGraph] | None = field(default=None, repr=False)


@njit(cache=True)
def _local_moves(
    indptr,
    indices,
    weights,
    deg,
    comm,
    sigma_tot,
    order,
    two_m,
    resolution,
    log_nodes,
    log_from,
    log_to,
    log_gain,
    log_cap,
):
    """Sweep until stable; returns (accepted moves, logged moves).

    For node i with weighted degree k_i, moving from community a to b
    changes modularity by 2*(score(b) - score(a)) / 2m where
    score(c) = w_(i->c) - resolution * sigma_tot(c without i) * k_i / 2m.
    Ties on the score prefer the lower community id; zero-gain moves are
    rejected so the sweep terminates.
    """
    n = comm.shape[0]
    w_to = np.zeros(n)
    touched = np.empty(n, dtype=np.int64)
    total_moves = 0
    n_log = 0
    moved = True
    while moved:
        moved = False
        for oi in range(n):
            i = order[oi]
            a = comm[i]
            nt = 0
            for e in range(indptr[i], indptr[i + 1]):
                j = indices[e]
                if j == i:
                    continue
                c = comm[j]
                if w_to[c] == 0.0:
                    touched[nt] = c
                    nt += 1
                w_to[c] += weights[e]
            k_i = deg[i]
            sigma_tot[a] -= k_i
            score_stay = w_to[a] - resolution * sigma_tot[a] * k_i / two_m
            best_c = a
            best_score = score_stay
            for t in range(nt):
                c = touched[t]
                if c == a:
                    continue
                s = w_to[c] - resolution * sigma_tot[c] * k_i / two_m
                if s > best_score or (s == best_score and c < best_c):
                    best_c = c
                    best_score = s
            if best_c != a and best_score > score_stay:
                comm[i] = best_c
                sigma_tot[best_c] += k_i
                moved = True
                total_moves += 1
                if n_log < log_cap:
                    log_nodes[n_log] = i
                    log_from[n_log] = a
                    log_to[n_log] = best_c
                    log_gain[n_log] = 2.0 * (best_score - score_stay) / two_m
                    n_log += 1
            else:
                sigma_tot[a] += k_i
            for t in range(nt):
                w_to[touched[t]] = 0.0
    return total_moves, n_log


def _csr_from_level(level: _LevelGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    src = np.concatenate([level.edge_u, level.edge_v])
    dst = np.concatenate([level.edge_v, level.edge_u])
    w = np.concatenate([level.edge_w, level.edge_w])
    order = np.argsort(src, kind="stable")
    src, dst, w = src[order], dst[order], w[order]
    indptr = np.zeros(level.n_nodes + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=level.n_nodes), out=indptr[1:])
    return indptr, dst.astype(np.int64), w.astype(np.float64)


def _modularity_level(level: _LevelGraph, comm: np.ndarray, resolution: float) -> float:
    deg = level.degrees()
    two_m = float(deg.sum())
    if two_m <= 0:
        raise ConfigError("graph has no edge weight")
    internal = comm[level.edge_u] == comm[level.edge_v]
    sum_in = 2.0 * float(level.edge_w[internal].sum()) + float(level.loops.sum())
    sigma_tot = np.bincount(comm, weights=deg, minlength=int(comm.max()) + 1)
    return sum_in / two_m - resolution * float(((sigma_tot / two_m) ** 2).sum())


def _contract(level: _LevelGraph, comm_dense: np.ndarray, n_comm: int) -> _LevelGraph:
    loops = np.bincount(comm_dense, weights=level.loops, minlength=n_comm)
    cu = comm_dense[level.edge_u]
    cv = comm_dense[level.edge_v]
    internal = cu == cv
    loops += 2.0 * np.bincount(cu[internal], weights=level.edge_w[internal], minlength=n_comm)
    lo = np.minimum(cu[~internal], cv[~internal])
    hi = np.maximum(cu[~internal], cv[~internal])
    key = lo * np.int64(n_comm) + hi
    uniq, inv = np.unique(key, return_inverse=True)
    w = np.bincount(inv, weights=level.edge_w[~internal])
    return _LevelGraph(
        n_nodes=n_comm,
        edge_u=(uniq // n_comm).astype(np.int64),
        edge_v=(uniq % n_comm).astype(np.int64),
        edge_w=w,
        loops=loops,
    )


def modularity(graph: KnnGraph, partition: Partition, resolution: float = 1.0) -> float:
    """Newman modularity of a partition, with a resolution multiplier on
    the null-model term."""
    if partition.n_items != graph.n_nodes:
        raise ConfigError(
            f"partition covers {partition.n_items} nodes, graph has {graph.n_nodes}"
        )
    level = _LevelGraph(
        n_nodes=graph.n_nodes,
        edge_u=graph.edge_u,
        edge_v=graph.edge_v,
        edge_w=graph.edge_w,
        loops=np.zeros(graph.n_nodes),
    )
    return _modularity_level(level, partition.assignment, resolution)


def louvain_cluster(
    graph: KnnGraph,
    resolution: float = 1.0,
    seed: int = 0,
    min_modularity_gain: float = 1e-6,
    track_moves: bool = False,
) -> LouvainResult:
    """Run multi-level modularity optimization on a weighted graph.

    Every completed pass contributes one level (over original node ids)
    and one modularity value; the run stops when a pass gains less than
    ``min_modularity_gain`` or makes no move. Deterministic for a seed.
    ``track_moves`` additionally records each pass's input graph and
    accepted moves so the incremental gains can be audited.
    """
    if graph.n_nodes == 0 or graph.n_edges == 0:
        raise ConfigError("graph must have at least one edge")
    if resolution <= 0:
        raise ConfigError(f"resolution must be > 0, got {resolution}")

    level = _LevelGraph(
        n_nodes=graph.n_nodes,
        edge_u=graph.edge_u.astype(np.int64),
        edge_v=graph.edge_v.astype(np.int64),
        edge_w=graph.edge_w.astype(np.float64),
        loops=np.zeros(graph.n_nodes),
    )
    rng = np.random.default_rng(seed)
    node_map = np.arange(graph.n_nodes, dtype=np.int64)
    levels: list[Partition] = []
    trace: list[float] = []
    move_logs: list[MoveLog] = []
    level_graphs: list[_LevelGraph] = []
    q_prev = _modularity_level(level, np.arange(level.n_nodes), resolution)

    while True:
        indptr, indices, weights = _csr_from_level(level)
        deg = level.degrees()
        two_m = float(deg.sum())
        comm = np.arange(level.n_nodes, dtype=np.int64)
        sigma_tot = deg.copy()
        order = rng.permutation(level.n_nodes).astype(np.int64)
        log_cap = 256 * level.n_nodes + 1024 if track_moves else 1
        log_nodes = np.empty(log_cap, dtype=np.int64)
        log_from = np.empty(log_cap, dtype=np.int64)
        log_to = np.empty(log_cap, dtype=np.int64)
        log_gain = np.empty(log_cap)
        total_moves, n_log = _local_moves(
            indptr,
            indices,
            weights,
            deg,
            comm,
            sigma_tot,
            order,
            two_m,
            resolution,
            log_nodes,
            log_from,
            log_to,
            log_gain,
            log_cap,
        )
        if track_moves:
            move_logs.append(
                MoveLog(
                    nodes=log_nodes[:n_log].copy(),
                    from_comm=log_from[:n_log].copy(),
                    to_comm=log_to[:n_log].copy(),
                    gains=log_gain[:n_log].copy(),
                )
            )
            level_graphs.append(level)

        if total_moves == 0:
            if not levels:
                # nothing improved on the first pass: singletons stand
                levels.append(Partition.from_assignment(node_map.copy()))
                trace.append(q_prev)
            break

        _, comm_dense = np.unique(comm, return_inverse=True)
        comm_dense = comm_dense.astype(np.int64).ravel()
        q = _modularity_level(level, comm, resolution)
        levels.append(Partition.from_assignment(comm_dense[node_map]))
        trace.append(q)
        if q - q_prev < min_modularity_gain:
            break
        q_prev = q
        level = _contract(level, comm_dense, int(comm_dense.max()) + 1)
        node_map = comm_dense[node_map]

    return LouvainResult(
        final=levels[-1],
        levels=levels,
        modularity_trace=np.asarray(trace),
        n_passes=len(levels),
        move_logs=move_logs if track_moves else None,
        level_graphs=level_graphs if track_moves else None,
    )


def flatten_level(result: LouvainResult, level: int) -> Partition:
    """Partition over original node ids after the given pass (0-based)."""
    if not 0 <= level < result.n_passes:
        raise ConfigError(f"level must be in [0, {result.n_passes}), got {level}")
    return result.levels[level]
