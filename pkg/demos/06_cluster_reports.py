"""Per-cluster reports: frequent terms, top bigrams, representative items.

This is what an analyst actually reads: for each cluster, which words
and word pairs dominate it and which member items sit nearest the
centroid. Bigrams are counted after stopword removal, so "journal of
contents" still surfaces "journal contents".
"""

import numpy as np

from embedcluster import (
    DEFAULT_STOPWORDS,
    MixtureSpec,
    Partition,
    build_cluster_reports,
    cluster_bigrams,
    generate,
    tokenize,
)

print(f"built-in stopword list: {len(DEFAULT_STOPWORDS)} words")
print(f"tokenize('The 2-1 Win!') -> {tokenize('The 2-1 Win!')}\n")

spec = MixtureSpec(n_clusters=4, n_items=2000, dim=32, separation=9.0, seed=3)
matrix, labels, corpus = generate(spec)
partition = Partition.from_assignment(labels.labels)

reports = build_cluster_reports(
    partition,
    corpus=corpus,
    matrix=matrix,
    min_term_frequency=5,
    top_bigrams=5,
    representatives_per_cluster=3,
)
for rep in reports:
    print(f"cluster {rep.cluster_id} ({rep.size} items)")
    print(f"  top terms:   {rep.top_terms[:5]}")
    print(f"  top bigrams: {rep.top_bigrams}")
    print(f"  nearest the centroid: {rep.representative_ids}")

# conservation: per-cluster counts add up to global counts
per_cluster = cluster_bigrams(corpus, partition, top_n=10**9)
merged = {}
for bigrams in per_cluster:
    for bg, count in bigrams:
        merged[bg] = merged.get(bg, 0) + count
total = sum(merged.values())
print(f"\n{len(merged)} distinct bigrams, {total} occurrences across all clusters")
