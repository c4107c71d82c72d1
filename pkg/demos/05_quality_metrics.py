"""Purity and NMI, and why both are reported.

Purity credits each cluster with its majority class, so shattering the
data into singletons scores a perfect 1.0. NMI normalizes mutual
information by the mean entropy of the two labelings, which makes
over-fragmentation cost something. Reading them together tells you
whether a high purity is real structure or just many tiny clusters.
"""

import numpy as np

from embedcluster import evaluate, nmi, purity

truth = np.repeat([0, 1, 2, 3], 25)  # 100 items, 4 balanced classes

perfect = truth.copy()
shattered = np.arange(100)            # every item its own cluster
lumped = np.zeros(100, dtype=int)     # everything in one cluster
noisy = truth.copy()
noisy[::7] = (noisy[::7] + 1) % 4     # ~14% of items mislabeled

for name, pred in [
    ("perfect", perfect),
    ("singletons", shattered),
    ("all-in-one", lumped),
    ("14% noise", noisy),
]:
    print(f"{name:11s} purity={purity(pred, truth):.3f}  nmi={nmi(pred, truth):.3f}")

print()
report = evaluate(noisy, truth)
print("evaluate() bundles everything:")
print(report.to_json())
print("csv row (n_clusters, purity, nmi):", report.to_csv_row().strip())
