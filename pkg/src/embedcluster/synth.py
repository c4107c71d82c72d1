"""Planted Gaussian-mixture embeddings with aligned labels and texts.

The single knob is ``separation``: the ratio of inter-center distance to
the within-cluster noise scale (fixed at 1). Low values (1-2) imitate
entangled, general-purpose embedding geometry; high values (8+) imitate
task-adapted geometry where classes are nearly linearly separable. The
generated corpus plants one signature bigram per cluster plus filler
words, so term/bigram extraction has an exact ground truth to count
against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .knn import KnnGraph, build_graph, knn_search
from .store import LabelSet, TextCorpus


@dataclass(frozen=True)
class MixtureSpec:
    """Parameters of one planted mixture draw."""

    n_clusters: int
    n_items: int
    dim: int
    separation: float = 8.0
    imbalance: tuple[float, ...] | None = None
    seed: int = 0
    size_mode: str = "quota"  # "quota" = exact largest-remainder sizes

    def __post_init__(self):
        if self.n_clusters < 1 or self.n_items < 1 or self.dim < 1:
            raise ConfigError("n_clusters, n_items and dim must all be >= 1")
        if self.n_clusters > self.n_items:
            raise ConfigError(
                f"n_clusters={self.n_clusters} exceeds n_items={self.n_items}"
            )
        if self.separation <= 0:
            raise ConfigError(f"separation must be > 0, got {self.separation}")
        if self.imbalance is not None:
            if len(self.imbalance) != self.n_clusters:
                raise ConfigError("imbalance must list one proportion per cluster")
            if any(p <= 0 for p in self.imbalance):
                raise ConfigError("imbalance proportions must be positive")
            if abs(sum(self.imbalance) - 1.0) > 1e-9:
                raise ConfigError("imbalance proportions must sum to 1")
        if self.size_mode not in ("quota", "multinomial"):
            raise ConfigError(f"size_mode must be 'quota' or 'multinomial', got {self.size_mode!r}")


def _cluster_sizes(spec: MixtureSpec, rng: np.random.Generator) -> np.ndarray:
    props = np.asarray(
        spec.imbalance if spec.imbalance is not None else [1.0 / spec.n_clusters] * spec.n_clusters
    )
    if spec.size_mode == "multinomial":
        sizes = rng.multinomial(spec.n_items, props)
    else:
        quotas = props * spec.n_items
        sizes = np.floor(quotas).astype(np.int64)
        leftover = spec.n_items - int(sizes.sum())
        if leftover > 0:
            order = np.argsort(-(quotas - sizes), kind="stable")
            sizes[order[:leftover]] += 1
    if (sizes == 0).any():
        # every planted cluster must be inhabited
        for c in np.flatnonzero(sizes == 0):
            donor = int(np.argmax(sizes))
            sizes[donor] -= 1
            sizes[c] += 1
    return sizes


def _centers(spec: MixtureSpec, rng: np.random.Generator) -> np.ndarray:
    scale = spec.separation / np.sqrt(2.0)
    if spec.n_clusters <= spec.dim:
        basis = np.linalg.qr(rng.standard_normal((spec.dim, spec.n_clusters)))[0].T
        return scale * basis  # pairwise center distance exactly `separation`
    # more clusters than dimensions: random unit directions, distances approximate
    raw = rng.standard_normal((spec.n_clusters, spec.dim))
    return scale * raw / np.linalg.norm(raw, axis=1, keepdims=True)


_FILLERS = ("the", "of", "and", "to", "in")


def _cluster_text(cluster: int, rng: np.random.Generator) -> str:
    pool = [f"topic{cluster}w{j}" for j in range(10)]
    words = [f"topic{cluster}a", f"topic{cluster}b"]
    for _ in range(int(rng.integers(3, 7))):
        words.append(_FILLERS[int(rng.integers(len(_FILLERS)))])
        words.append(pool[int(rng.integers(len(pool)))])
    return " ".join(words)


def generate(spec: MixtureSpec) -> tuple[np.ndarray, LabelSet, TextCorpus]:
    """Draw embeddings, labels and templated texts for a mixture spec.

    Rows are shuffled so cluster members interleave; everything is
    deterministic for the spec's seed.
    """
    rng = np.random.default_rng(spec.seed)
    sizes = _cluster_sizes(spec, rng)
    centers = _centers(spec, rng)
    labels = np.repeat(np.arange(spec.n_clusters), sizes)
    x = rng.standard_normal((spec.n_items, spec.dim)) + centers[labels]
    perm = rng.permutation(spec.n_items)
    x = x[perm].astype(np.float32)
    labels = labels[perm]
    texts = [_cluster_text(int(c), rng) for c in labels]
    corpus = TextCorpus(ids=np.arange(spec.n_items, dtype=np.int64), texts=texts)
    label_set = LabelSet(
        labels=labels.astype(np.int64),
        n_classes=spec.n_clusters,
        class_names=[f"cluster{c}" for c in range(spec.n_clusters)],
    )
    return x, label_set, corpus


def planted_graph(
    spec: MixtureSpec,
    k: int,
    weighting: str = "gaussian",
    sigma: float | None = None,
    threads: int | None = None,
) -> tuple[KnnGraph, LabelSet]:
    """Generate a mixture and build its symmetrized k-NN graph."""
    x, labels, _ = generate(spec)
    neighbors = knn_search(x, k=k, threads=threads)
    return build_graph(neighbors, weighting=weighting, sigma=sigma), labels
