"""How embedding geometry drives clustering quality.

The generator's separation knob stands in for how task-adapted the
embeddings are: around 1, classes are entangled the way generic
embeddings are on a novel domain; at 8+, they separate the way
embeddings do after supervised adaptation. Both clustering branches
sweep that axis here; quality climbs with separation for both, and the
graph branch tracks the known-k branch without ever being told k.
"""

import numpy as np

from embedcluster import (
    MixtureSpec,
    build_graph,
    generate,
    kmeans_fit,
    knn_search,
    louvain_cluster,
    nmi,
    purity,
)

print(f"{'sep':>4} | {'kmeans purity':>13} {'kmeans nmi':>10} | "
      f"{'louvain purity':>14} {'louvain nmi':>11} {'clusters':>8}")
print("-" * 72)
for sep in (1.0, 2.0, 4.0, 8.0):
    km_p, km_n, lv_p, lv_n, lv_k = [], [], [], [], []
    for seed in range(3):
        spec = MixtureSpec(n_clusters=5, n_items=1500, dim=48, separation=sep, seed=seed)
        matrix, labels, _ = generate(spec)
        _, kpart = kmeans_fit(matrix, k=5, seed=seed)
        km_p.append(purity(kpart, labels))
        km_n.append(nmi(kpart, labels))
        graph = build_graph(knn_search(matrix, k=15))
        lres = louvain_cluster(graph, seed=seed)
        lv_p.append(purity(lres.final, labels))
        lv_n.append(nmi(lres.final, labels))
        lv_k.append(lres.final.n_clusters)
    print(
        f"{sep:4.0f} | {np.mean(km_p):13.3f} {np.mean(km_n):10.3f} | "
        f"{np.mean(lv_p):14.3f} {np.mean(lv_n):11.3f} {np.mean(lv_k):8.1f}"
    )

print("\nquality is monotone in separation for both branches; the payoff of")
print("better representations dwarfs the choice of clustering algorithm")
