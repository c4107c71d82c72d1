"""Clustering engine for dense text-embedding matrices.

Turns an (n_items x dim) float32 embedding matrix into cluster
structure: exact k-NN graph construction, k-means (cluster count known)
or Louvain community detection (count unknown), purity/NMI quality
scores against ground-truth labels, and per-cluster frequent-term and
bigram reports. A planted Gaussian-mixture generator provides synthetic
data with exact ground truth for testing and benchmarking.
"""

from .errors import ConfigError, DataFormatError, EmbedClusterError
from .kmeans import KmeansModel, assign, kmeans_fit, load_model, save_model
from .knn import (
    DegreeStats,
    KnnGraph,
    NeighborList,
    build_graph,
    degree_stats,
    knn_search,
    load_edgelist,
    nearest_centers,
    save_edgelist,
)
from .louvain import LouvainResult, flatten_level, louvain_cluster, modularity
from .metrics import ContingencyTable, QualityReport, contingency, evaluate, nmi, purity
from .partition import Partition, load_partition, save_partition
from .pipeline import PipelineConfig, RunManifest, run_bench, run_pipeline, run_sweep
from .stopwords import DEFAULT_STOPWORDS, load_stopwords
from .store import (
    LabelSet,
    TextCorpus,
    load_corpus,
    load_embeddings,
    save_corpus,
    save_embeddings,
    stratified_sample,
    validate_embeddings,
)
from .summarize import (
    ClusterReport,
    build_cluster_reports,
    cluster_bigrams,
    cluster_terms,
    representatives,
    tokenize,
)
from .synth import MixtureSpec, generate, planted_graph

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataFormatError",
    "EmbedClusterError",
    "KmeansModel",
    "assign",
    "kmeans_fit",
    "load_model",
    "save_model",
    "DegreeStats",
    "KnnGraph",
    "NeighborList",
    "build_graph",
    "degree_stats",
    "knn_search",
    "load_edgelist",
    "nearest_centers",
    "save_edgelist",
    "LouvainResult",
    "flatten_level",
    "louvain_cluster",
    "modularity",
    "ContingencyTable",
    "QualityReport",
    "contingency",
    "evaluate",
    "nmi",
    "purity",
    "Partition",
    "load_partition",
    "save_partition",
    "PipelineConfig",
    "RunManifest",
    "run_bench",
    "run_pipeline",
    "run_sweep",
    "DEFAULT_STOPWORDS",
    "load_stopwords",
    "LabelSet",
    "TextCorpus",
    "load_corpus",
    "load_embeddings",
    "save_corpus",
    "save_embeddings",
    "stratified_sample",
    "validate_embeddings",
    "ClusterReport",
    "build_cluster_reports",
    "cluster_bigrams",
    "cluster_terms",
    "representatives",
    "tokenize",
    "MixtureSpec",
    "generate",
    "planted_graph",
]
