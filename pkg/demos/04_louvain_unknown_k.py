"""The unknown-cluster-count branch: Louvain on the k-NN graph.

Community detection needs no cluster count: it greedily maximizes
modularity, contracting communities level by level. The result keeps
the whole hierarchy, so an analyst can drill into a coarse cluster by
looking one level down.
"""

import numpy as np

from embedcluster import (
    MixtureSpec,
    flatten_level,
    louvain_cluster,
    modularity,
    planted_graph,
    purity,
)

spec = MixtureSpec(n_clusters=8, n_items=8000, dim=64, separation=8.0, seed=2)
graph, labels = planted_graph(spec, k=15)
print(f"graph: {graph.n_nodes} nodes, {graph.n_edges} edges")

result = louvain_cluster(graph, seed=0)
print(f"passes: {result.n_passes}")
print(f"modularity trace: {np.round(result.modularity_trace, 4).tolist()}")
print(f"clusters found: {result.final.n_clusters} (true count: 8, never told to the algorithm)")
print(f"purity: {purity(result.final, labels):.4f}\n")

# the hierarchy: earlier levels are strictly finer
for lvl in range(result.n_passes):
    part = flatten_level(result, lvl)
    print(f"level {lvl}: {part.n_clusters} clusters, modularity {modularity(graph, part):.4f}")

# resolution is the coarseness knob: below 1 merges, above 1 splits
for gamma in (0.2, 1.0, 3.0):
    res = louvain_cluster(graph, resolution=gamma, seed=0)
    print(f"resolution {gamma}: {res.final.n_clusters} clusters")
