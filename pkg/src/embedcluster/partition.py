"""Cluster assignments shared by the k-means and Louvain branches."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataFormatError


@dataclass(frozen=True)
class Partition:
    """A complete assignment of items to clusters ``0..n_clusters-1``.

    Clustering fits return partitions with every cluster non-empty;
    out-of-sample assignment against fixed centroids may legitimately
    leave a cluster without members, so the container itself allows it.
    """

    assignment: np.ndarray  # int64, values in [0, n_clusters)
    n_clusters: int
    sizes: np.ndarray  # int64, len n_clusters, sums to n_items

    @classmethod
    def from_assignment(cls, assignment: np.ndarray) -> "Partition":
        """Build a partition, relabeling cluster ids to dense 0..k-1.

        Dense ids follow ascending original-id order, so relabeling is
        deterministic.
        """
        assignment = np.asarray(assignment)
        _, dense = np.unique(assignment, return_inverse=True)
        dense = dense.astype(np.int64).ravel()
        sizes = np.bincount(dense)
        return cls(assignment=dense, n_clusters=len(sizes), sizes=sizes)

    @property
    def n_items(self) -> int:
        return len(self.assignment)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cluster)

    def __post_init__(self):
        if self.sizes.sum() != len(self.assignment):
            raise ValueError("cluster sizes do not sum to the number of items")
        if len(self.assignment) and self.assignment.max() >= self.n_clusters:
            raise ValueError("cluster index out of range")


def save_partition(partition: Partition, path: str | Path) -> None:
    """Dump as line-delimited ``id cluster`` text, items in row order."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, c in enumerate(partition.assignment):
            fh.write(f"{i} {int(c)}\n")


def load_partition(path: str | Path) -> Partition:
    """Read a partition dump written by :func:`save_partition`."""
    ids: list[int] = []
    clusters: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise DataFormatError(f"{path}:{lineno}: expected 'id cluster'")
            ids.append(int(parts[0]))
            clusters.append(int(parts[1]))
    if not ids:
        raise DataFormatError(f"{path}: empty partition file")
    order = np.argsort(np.asarray(ids))
    return Partition.from_assignment(np.asarray(clusters, dtype=np.int64)[order])
