"""Lloyd's k-means with k-means++ or random seeding.

Training can run on a uniform random subset of the rows (``sample_cap``)
with the fitted centroids then assigning the full matrix, mirroring the
subsampled training used by large-scale k-means implementations. A
cluster that loses all members is reseeded with the point currently
farthest from its assigned centroid, so fitted partitions never contain
empty clusters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .knn import nearest_centers
from .partition import Partition
from .store import load_embeddings, save_embeddings

AUTO_SAMPLE_FACTOR = 256  # sample_cap="auto" trains on up to 256*k rows


@dataclass(frozen=True)
class KmeansModel:
    """Fitted centroids plus convergence bookkeeping.

    ``inertia`` is the sum of squared distances of every row to its
    assigned centroid on the full matrix; ``inertia_trace`` records the
    (training-subset) inertia at each Lloyd iteration and is
    non-increasing.
    """

    centroids: np.ndarray  # (k, dim) float64
    inertia: float
    iterations_run: int
    inertia_trace: np.ndarray = field(default=None, repr=False)
    sample_size: int = 0

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


def _init_plusplus(train: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++: the first center is uniform; each later center is
    drawn by squared-distance weighting over a few candidates and the one
    shrinking the total potential most is kept. Already-chosen points have
    zero weight, so they cannot repeat while distinct points remain."""
    n = train.shape[0]
    n_trials = 2 + int(np.log(k))
    centers = np.empty((k, train.shape[1]))
    centers[0] = train[rng.integers(n)]
    _, closest = nearest_centers(train, centers[:1])
    potential = closest.sum()
    for c in range(1, k):
        if potential <= 0.0:
            raise ConfigError(f"k={k} exceeds the number of distinct rows")
        draws = rng.random(n_trials) * potential
        cum = np.cumsum(closest)
        candidates = np.minimum(np.searchsorted(cum, draws), n - 1)
        d_each = _sqdist_to_points(train, train[candidates])
        new_closest = np.minimum(closest[:, None], d_each)
        new_potentials = new_closest.sum(axis=0)
        best = int(np.argmin(new_potentials))
        centers[c] = train[candidates[best]]
        closest = new_closest[:, best]
        potential = float(new_potentials[best])
    return centers


def _sqdist_to_points(x: np.ndarray, points: np.ndarray) -> np.ndarray:
    xn = np.einsum("ij,ij->i", x, x)
    pn = np.einsum("ij,ij->i", points, points)
    d = xn[:, None] + pn[None, :] - 2.0 * (x @ points.T)
    np.maximum(d, 0.0, out=d)
    return d


def _init_random(train: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    idx = rng.choice(train.shape[0], size=k, replace=False)
    return train[idx].astype(np.float64)


def _repair_empty(centroids, points, assign_idx, d2, counts):
    """Reseed each empty cluster with the farthest point from its centroid.

    Mutates all four arrays in place. Points whose cluster would be
    emptied by the donation are skipped. Returns False when no usable
    donor remains (fewer distinct points than clusters).
    """
    empties = np.flatnonzero(counts == 0)
    if not len(empties):
        return True
    order = np.argsort(-d2, kind="stable")
    pos = 0
    for c in empties:
        while pos < len(order):
            p = order[pos]
            pos += 1
            if d2[p] > 0.0 and counts[assign_idx[p]] > 1:
                break
        else:
            return False
        counts[assign_idx[p]] -= 1
        centroids[c] = points[p]
        assign_idx[p] = c
        d2[p] = 0.0
        counts[c] = 1
    return True


def _lloyd(train, k, init, max_iter, tol, rng):
    """One Lloyd run from a fresh init; returns (centroids, trace)."""
    centroids = _init_plusplus(train, k, rng) if init == "kmeans++" else _init_random(train, k, rng)
    trace: list[float] = []
    prev_assign = None
    prev_inertia = None
    for _ in range(max_iter):
        assign_idx, d2 = nearest_centers(train, centroids)
        counts = np.bincount(assign_idx, minlength=k)
        if not _repair_empty(centroids, train, assign_idx, d2, counts):
            if len(np.unique(train, axis=0)) < k:
                raise ConfigError(f"k={k} exceeds the number of distinct rows")
            raise RuntimeError("empty-cluster repair failed")
        inertia = float(d2.sum())
        trace.append(inertia)
        # means per cluster, deterministic accumulation
        sums = np.empty((k, train.shape[1]))
        for j in range(train.shape[1]):
            sums[:, j] = np.bincount(assign_idx, weights=train[:, j], minlength=k)
        centroids = sums / counts[:, None]
        if prev_assign is not None and np.array_equal(assign_idx, prev_assign):
            break
        if prev_inertia is not None:
            if inertia == 0.0 or (prev_inertia - inertia) < tol * prev_inertia:
                break
        prev_assign = assign_idx
        prev_inertia = inertia
    return centroids, trace


def kmeans_fit(
    matrix: np.ndarray,
    k: int,
    init: str = "kmeans++",
    sample_cap: int | str | None = "auto",
    max_iter: int = 100,
    tol: float = 1e-4,
    seed: int = 0,
    n_init: int = 4,
) -> tuple[KmeansModel, Partition]:
    """Fit k-means and assign every row of the matrix.

    ``sample_cap`` limits the training subset: ``"auto"`` uses 256*k
    rows, ``None`` trains on everything, an int caps it explicitly.
    Lloyd stops when the relative inertia improvement drops below
    ``tol``, the assignment stops changing, or ``max_iter`` is reached.
    ``n_init`` independent restarts are run and the lowest-inertia one
    kept (single-init Lloyd lands in bad basins often enough to matter).
    Fully deterministic for a given seed.
    """
    x = np.ascontiguousarray(matrix, dtype=np.float32).astype(np.float64)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"k must satisfy 1 <= k <= n_items, got k={k}, n_items={n}")
    if max_iter < 1:
        raise ConfigError(f"max_iter must be >= 1, got {max_iter}")
    if tol < 0:
        raise ConfigError(f"tol must be >= 0, got {tol}")
    if n_init < 1:
        raise ConfigError(f"n_init must be >= 1, got {n_init}")
    if init not in ("kmeans++", "random"):
        raise ConfigError(f"init must be 'kmeans++' or 'random', got {init!r}")
    if sample_cap == "auto":
        sample_cap = AUTO_SAMPLE_FACTOR * k
    elif isinstance(sample_cap, str):
        raise ConfigError(f"sample_cap must be an int, None or 'auto', got {sample_cap!r}")

    rng = np.random.default_rng(seed)
    if sample_cap is not None and sample_cap < n:
        sample_idx = rng.choice(n, size=max(int(sample_cap), k), replace=False)
        train = x[sample_idx]
    else:
        train = x
    sample_size = train.shape[0]

    centroids = None
    trace = None
    for _ in range(n_init):
        cand_centroids, cand_trace = _lloyd(train, k, init, max_iter, tol, rng)
        if trace is None or cand_trace[-1] < trace[-1]:
            centroids, trace = cand_centroids, cand_trace
        if trace[-1] == 0.0:
            break

    # final assignment of the full matrix against the trained centroids
    full_assign, full_d2 = nearest_centers(x, centroids)
    full_counts = np.bincount(full_assign, minlength=k)
    if not _repair_empty(centroids, x, full_assign, full_d2, full_counts):
        if len(np.unique(x, axis=0)) < k:
            raise ConfigError(f"k={k} exceeds the number of distinct rows")
        raise RuntimeError("empty-cluster repair failed")

    model = KmeansModel(
        centroids=centroids,
        inertia=float(full_d2.sum()),
        iterations_run=len(trace),
        inertia_trace=np.asarray(trace),
        sample_size=sample_size,
    )
    part = Partition(assignment=full_assign, n_clusters=k, sizes=full_counts)
    return model, part


def assign(model: KmeansModel, matrix: np.ndarray) -> Partition:
    """Nearest-centroid assignment; ties go to the lower centroid index."""
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.dim:
        raise ConfigError(
            f"dimension mismatch: matrix has {x.shape[1] if x.ndim == 2 else '?'} columns, "
            f"model expects {model.dim}"
        )
    idx, _ = nearest_centers(x, model.centroids)
    return Partition(
        assignment=idx,
        n_clusters=model.k,
        sizes=np.bincount(idx, minlength=model.k),
    )


def save_model(model: KmeansModel, path: str | Path) -> None:
    """Centroids in the binary embedding format plus a JSON sidecar."""
    path = Path(path)
    save_embeddings(model.centroids.astype(np.float32), path)
    sidecar = {
        "k": model.k,
        "dim": model.dim,
        "inertia": model.inertia,
        "iterations_run": model.iterations_run,
        "sample_size": model.sample_size,
    }
    Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> KmeansModel:
    path = Path(path)
    centroids = load_embeddings(path).astype(np.float64)
    meta = json.loads(Path(str(path) + ".json").read_text(encoding="utf-8"))
    return KmeansModel(
        centroids=centroids,
        inertia=float(meta["inertia"]),
        iterations_run=int(meta["iterations_run"]),
        inertia_trace=None,
        sample_size=int(meta.get("sample_size", 0)),
    )
