"""Per-cluster frequent terms, bigrams and representative items.

Tokens are lowercase maximal alphanumeric runs; purely numeric tokens
are kept (score-like bigrams such as "2 1" are meaningful). Bigrams are
formed over the token sequence after stopword removal, so a bigram may
bridge a dropped stopword ("journal of contents" yields
"journal contents") but never crosses text boundaries.
"""

from __future__ import annotations

import csv
import json
import re
from collections import Counter
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .errors import DataFormatError
from .partition import Partition
from .stopwords import DEFAULT_STOPWORDS
from .store import TextCorpus

_TOKEN = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class ClusterReport:
    cluster_id: int
    size: int
    top_terms: list[tuple[str, int]]
    top_bigrams: list[tuple[str, int]]
    representative_ids: list[int]


def tokenize(text: str, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> list[str]:
    return [t for t in _TOKEN.findall(text.lower()) if t not in stopwords]


def _ranked(counter: Counter, limit: int | None = None, min_count: int = 1) -> list[tuple[str, int]]:
    items = [(w, c) for w, c in counter.items() if c >= min_count]
    items.sort(key=lambda wc: (-wc[1], wc[0]))
    return items if limit is None else items[:limit]


def _check_alignment(corpus: TextCorpus, partition: Partition) -> None:
    if len(corpus) != partition.n_items:
        raise DataFormatError(
            f"corpus has {len(corpus)} items but partition covers {partition.n_items}"
        )


def cluster_bigrams(
    corpus: TextCorpus,
    partition: Partition,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
    top_n: int = 10,
) -> list[list[tuple[str, int]]]:
    """Top adjacent-token bigrams per cluster, ties broken lexicographically."""
    _check_alignment(corpus, partition)
    counters = [Counter() for _ in range(partition.n_clusters)]
    for i, text in enumerate(corpus.texts):
        toks = tokenize(text, stopwords)
        counters[partition.assignment[i]].update(
            f"{toks[j]} {toks[j + 1]}" for j in range(len(toks) - 1)
        )
    return [_ranked(c, limit=top_n) for c in counters]


def cluster_terms(
    corpus: TextCorpus,
    partition: Partition,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
    min_frequency: int = 1,
) -> list[list[tuple[str, int]]]:
    """Unigram frequencies per cluster, filtered by a minimum count."""
    _check_alignment(corpus, partition)
    counters = [Counter() for _ in range(partition.n_clusters)]
    for i, text in enumerate(corpus.texts):
        counters[partition.assignment[i]].update(tokenize(text, stopwords))
    return [_ranked(c, min_count=min_frequency) for c in counters]


def representatives(
    matrix: np.ndarray, partition: Partition, per_cluster: int = 3
) -> list[list[int]]:
    """Item ids closest to each cluster's mean vector, ties to the lower id."""
    x = np.asarray(matrix, dtype=np.float64)
    if x.shape[0] != partition.n_items:
        raise DataFormatError(
            f"matrix has {x.shape[0]} rows but partition covers {partition.n_items}"
        )
    out: list[list[int]] = []
    for c in range(partition.n_clusters):
        members = partition.members(c)
        if len(members) == 0:
            out.append([])
            continue
        centroid = x[members].mean(axis=0)
        d2 = ((x[members] - centroid) ** 2).sum(axis=1)
        order = np.lexsort((members, d2))
        out.append([int(members[i]) for i in order[:per_cluster]])
    return out


def build_cluster_reports(
    partition: Partition,
    corpus: TextCorpus | None = None,
    matrix: np.ndarray | None = None,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
    min_term_frequency: int = 2,
    top_bigrams: int = 10,
    representatives_per_cluster: int = 3,
) -> list[ClusterReport]:
    """Assemble one report per cluster; term lists need the corpus and
    representatives need the embedding matrix, each skipped when absent."""
    terms = (
        cluster_terms(corpus, partition, stopwords, min_term_frequency)
        if corpus is not None
        else [[] for _ in range(partition.n_clusters)]
    )
    bigrams = (
        cluster_bigrams(corpus, partition, stopwords, top_bigrams)
        if corpus is not None
        else [[] for _ in range(partition.n_clusters)]
    )
    reps = (
        representatives(matrix, partition, representatives_per_cluster)
        if matrix is not None
        else [[] for _ in range(partition.n_clusters)]
    )
    return [
        ClusterReport(
            cluster_id=c,
            size=int(partition.sizes[c]),
            top_terms=terms[c],
            top_bigrams=bigrams[c],
            representative_ids=reps[c],
        )
        for c in range(partition.n_clusters)
    ]


def save_reports_json(reports: list[ClusterReport], path: str | Path) -> None:
    payload = [asdict(r) for r in reports]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def save_reports_csv(reports: list[ClusterReport], path: str | Path) -> None:
    """Flat rows: one line per (cluster, kind, rank) entry."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cluster_id", "size", "kind", "rank", "value", "count"])
        for r in reports:
            for rank, (term, count) in enumerate(r.top_terms):
                writer.writerow([r.cluster_id, r.size, "term", rank, term, count])
            for rank, (bigram, count) in enumerate(r.top_bigrams):
                writer.writerow([r.cluster_id, r.size, "bigram", rank, bigram, count])
            for rank, item in enumerate(r.representative_ids):
                writer.writerow([r.cluster_id, r.size, "representative", rank, item, ""])
