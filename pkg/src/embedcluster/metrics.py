"""Cluster-quality metrics: contingency table, purity and NMI.

Purity credits every predicted cluster with its majority true class:
``(1/N) * sum_k max_j |cluster_k intersect class_j|``. NMI is the mutual
information between the two labelings normalized by the arithmetic mean
of their entropies, which is what penalizes shattering the data into
many small pure clusters. Entropies use natural logs (the ratio is
base-invariant) and ``0 * log 0 = 0``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError


def _as_label_array(obj) -> np.ndarray:
    """Accept a Partition, LabelSet or plain integer array."""
    arr = getattr(obj, "assignment", None)
    if arr is None:
        arr = getattr(obj, "labels", None)
    if arr is None:
        arr = obj
    arr = np.asarray(arr, dtype=np.int64)
    if arr.ndim != 1:
        raise DataFormatError("labels must be a 1-D integer array")
    return arr


@dataclass(frozen=True)
class ContingencyTable:
    """Joint counts of (predicted cluster, true class) memberships."""

    counts: np.ndarray  # (n_pred, n_true) int64
    pred_marginals: np.ndarray
    true_marginals: np.ndarray
    total: int


@dataclass(frozen=True)
class QualityReport:
    purity: float
    nmi: float
    n_clusters_pred: int
    n_classes_truth: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "purity": self.purity,
                "nmi": self.nmi,
                "n_clusters_pred": self.n_clusters_pred,
                "n_classes_truth": self.n_classes_truth,
            },
            indent=2,
        )

    def to_csv_row(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow([self.n_clusters_pred, f"{self.purity:.6f}", f"{self.nmi:.6f}"])
        return buf.getvalue()


def contingency(pred, truth) -> ContingencyTable:
    """Exact joint count matrix between two labelings of the same items."""
    p = _as_label_array(pred)
    t = _as_label_array(truth)
    if len(p) != len(t):
        raise DataFormatError(f"size mismatch: {len(p)} predictions vs {len(t)} labels")
    if len(p) == 0:
        raise DataFormatError("cannot evaluate an empty labeling")
    n_pred = int(p.max()) + 1
    n_true = int(t.max()) + 1
    counts = np.bincount(p * n_true + t, minlength=n_pred * n_true).reshape(n_pred, n_true)
    return ContingencyTable(
        counts=counts,
        pred_marginals=counts.sum(axis=1),
        true_marginals=counts.sum(axis=0),
        total=int(counts.sum()),
    )


def purity(pred, truth) -> float:
    table = contingency(pred, truth)
    return float(table.counts.max(axis=1).sum()) / table.total


def nmi(pred, truth) -> float:
    """Normalized mutual information in [0, 1].

    Degenerate conventions: if both labelings are single-group (both
    entropies zero) they agree perfectly, NMI = 1; if exactly one is
    single-group it carries no information, NMI = 0.
    """
    table = contingency(pred, truth)
    n = table.total
    # a bijective table means the labelings agree up to renaming: NMI is
    # exactly 1 there, no need to round-trip through logs
    nonzero = table.counts > 0
    row_occupied = table.pred_marginals > 0
    col_occupied = table.true_marginals > 0
    if (nonzero.sum(axis=1)[row_occupied] == 1).all() and (
        nonzero.sum(axis=0)[col_occupied] == 1
    ).all():
        return 1.0
    joint = table.counts / n
    pk = table.pred_marginals / n
    tj = table.true_marginals / n
    h_pred = float(-np.sum(pk[pk > 0] * np.log(pk[pk > 0])))
    h_true = float(-np.sum(tj[tj > 0] * np.log(tj[tj > 0])))
    if h_pred == 0.0 and h_true == 0.0:
        return 1.0
    if h_pred == 0.0 or h_true == 0.0:
        return 0.0
    nz = joint > 0
    outer = pk[:, None] * tj[None, :]
    mi = float(np.sum(joint[nz] * np.log(joint[nz] / outer[nz])))
    value = mi / ((h_pred + h_true) / 2.0)
    # exact-arithmetic value lies in [0, 1]; clip float residue only
    return float(min(max(value, 0.0), 1.0))


def evaluate(pred, truth) -> QualityReport:
    """Bundle purity, NMI and the two group counts."""
    p = _as_label_array(pred)
    t = _as_label_array(truth)
    return QualityReport(
        purity=purity(p, t),
        nmi=nmi(p, t),
        n_clusters_pred=len(np.unique(p)),
        n_classes_truth=len(np.unique(t)),
    )
