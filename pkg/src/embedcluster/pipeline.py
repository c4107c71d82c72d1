"""End-to-end orchestration: files in, partition + reports out.

Two branches, chosen by whether the caller knows the cluster count:
``kmeans`` runs directly on the embeddings (no graph is built), while
``louvain`` first constructs the symmetrized k-NN graph and then
optimizes modularity on it. When ground-truth labels are available a
purity/NMI quality report is emitted alongside the partition and the
per-cluster term reports. Stage wall times use the short names knn /
kms / lvn so timing tables read like the usual breakdown columns.
"""

from __future__ import annotations

import dataclasses
import io
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import kmeans as kmeans_mod
from . import louvain as louvain_mod
from .errors import ConfigError
from .knn import build_graph, knn_search, save_edgelist
from .metrics import evaluate
from .partition import save_partition
from .store import LabelSet, load_corpus, load_embeddings
from .stopwords import DEFAULT_STOPWORDS, load_stopwords
from .summarize import build_cluster_reports, save_reports_json
from .synth import MixtureSpec, generate


@dataclass(frozen=True)
class PipelineConfig:
    embeddings: str
    corpus: str | None = None
    labels: str | None = None  # corpus-format file; defaults to `corpus`
    mode: str = "louvain"
    kmeans_k: int | None = None
    knn_k: int = 15
    weighting: str = "gaussian"
    sigma: float | None = None
    kmeans_init: str = "kmeans++"
    sample_cap: int | str | None = "auto"
    max_iter: int = 100
    tol: float = 1e-4
    resolution: float = 1.0
    min_modularity_gain: float = 1e-6
    stopwords_file: str | None = None
    min_term_frequency: int = 2
    top_bigrams: int = 10
    representatives_per_cluster: int = 3
    seed: int = 0
    outdir: str = "out"
    threads: int | None = None
    block_size: int = 512
    dump_graph: bool = False

    def validate(self) -> None:
        if self.mode not in ("kmeans", "louvain"):
            raise ConfigError(f"mode must be 'kmeans' or 'louvain', got {self.mode!r}")
        if self.mode == "kmeans" and (self.kmeans_k is None or self.kmeans_k < 1):
            raise ConfigError("mode=kmeans requires kmeans_k >= 1")
        if self.knn_k < 1:
            raise ConfigError(f"knn_k must be >= 1, got {self.knn_k}")
        for name in ("embeddings", "corpus", "labels", "stopwords_file"):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise ConfigError(f"{name} file does not exist: {path}")

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class RunManifest:
    partition_path: str
    quality_report_path: str | None
    cluster_reports_path: str
    timings: dict[str, float]
    mode: str
    seed: int
    n_items: int
    dim: int
    n_clusters: int
    sample_size: int | None = None  # k-means training subset, surfaced for honesty
    modularity: float | None = None
    graph_path: str | None = None

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2)


def _load_labels(config: PipelineConfig) -> LabelSet | None:
    source = config.labels or config.corpus
    if source is None:
        return None
    _, labels = load_corpus(source)
    if config.labels is not None and labels is None:
        raise ConfigError(f"labels file {config.labels} has no label fields")
    return labels


def run_pipeline(config: PipelineConfig) -> RunManifest:
    """Execute one clustering run; outputs land in ``config.outdir``.

    On failure every file written so far is removed, so the output
    directory never holds a partial result set.
    """
    config.validate()
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    created: list[Path] = []
    try:
        return _run_pipeline_inner(config, outdir, created)
    except BaseException:
        for path in created:
            path.unlink(missing_ok=True)
        raise


def _run_pipeline_inner(config, outdir, created):
    matrix = load_embeddings(config.embeddings)
    corpus = None
    if config.corpus is not None:
        corpus, _ = load_corpus(config.corpus)
    labels = _load_labels(config)
    stop = (
        load_stopwords(config.stopwords_file)
        if config.stopwords_file is not None
        else DEFAULT_STOPWORDS
    )

    timings: dict[str, float] = {}
    sample_size = None
    q_value = None
    graph_path = None

    if config.mode == "kmeans":
        t0 = time.perf_counter()
        model, part = kmeans_mod.kmeans_fit(
            matrix,
            k=config.kmeans_k,
            init=config.kmeans_init,
            sample_cap=config.sample_cap,
            max_iter=config.max_iter,
            tol=config.tol,
            seed=config.seed,
        )
        timings["kms"] = time.perf_counter() - t0
        sample_size = model.sample_size
    else:
        t0 = time.perf_counter()
        neighbors = knn_search(
            matrix, k=config.knn_k, block_size=config.block_size, threads=config.threads
        )
        graph = build_graph(neighbors, weighting=config.weighting, sigma=config.sigma)
        timings["knn"] = time.perf_counter() - t0
        if config.dump_graph:
            graph_file = outdir / "graph.txt"
            save_edgelist(graph, graph_file)
            created.append(graph_file)
            graph_path = str(graph_file)
        t0 = time.perf_counter()
        result = louvain_mod.louvain_cluster(
            graph,
            resolution=config.resolution,
            seed=config.seed,
            min_modularity_gain=config.min_modularity_gain,
        )
        part = result.final
        timings["lvn"] = time.perf_counter() - t0
        q_value = float(result.modularity_trace[-1])

    partition_path = outdir / "partition.txt"
    save_partition(part, partition_path)
    created.append(partition_path)

    quality_path = None
    if labels is not None:
        t0 = time.perf_counter()
        report = evaluate(part, labels)
        timings["eval"] = time.perf_counter() - t0
        quality_path = outdir / "quality.json"
        quality_path.write_text(report.to_json() + "\n", encoding="utf-8")
        created.append(quality_path)

    t0 = time.perf_counter()
    reports = build_cluster_reports(
        part,
        corpus=corpus,
        matrix=matrix,
        stopwords=stop,
        min_term_frequency=config.min_term_frequency,
        top_bigrams=config.top_bigrams,
        representatives_per_cluster=config.representatives_per_cluster,
    )
    timings["report"] = time.perf_counter() - t0
    reports_path = outdir / "cluster_reports.json"
    save_reports_json(reports, reports_path)
    created.append(reports_path)

    manifest = RunManifest(
        partition_path=str(partition_path),
        quality_report_path=str(quality_path) if quality_path else None,
        cluster_reports_path=str(reports_path),
        timings=timings,
        mode=config.mode,
        seed=config.seed,
        n_items=matrix.shape[0],
        dim=matrix.shape[1],
        n_clusters=part.n_clusters,
        sample_size=sample_size,
        modularity=q_value,
        graph_path=graph_path,
    )
    manifest_path = outdir / "manifest.json"
    manifest_path.write_text(manifest.to_json() + "\n", encoding="utf-8")
    created.append(manifest_path)
    return manifest


def run_sweep(
    base: PipelineConfig, repeats: int = 5, seeds: list[int] | None = None
) -> str:
    """Repeat a run across seeds; returns CSV with per-seed rows plus
    mean/stddev aggregates of purity, NMI and cluster count."""
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")
    if seeds is None:
        seeds = [base.seed + i for i in range(repeats)]
    base.validate()
    if (base.labels or base.corpus) is None:
        raise ConfigError("sweep needs labels to aggregate quality scores")

    rows = []
    for s in seeds:
        cfg = replace(base, seed=s, outdir=str(Path(base.outdir) / f"run_seed{s}"))
        manifest = run_pipeline(cfg)
        if manifest.quality_report_path is None:
            raise ConfigError("sweep needs labels to aggregate quality scores")
        quality = json.loads(Path(manifest.quality_report_path).read_text(encoding="utf-8"))
        rows.append((s, manifest.n_clusters, quality["purity"], quality["nmi"]))

    buf = io.StringIO()
    buf.write("seed,n_clusters,purity,nmi\n")
    for s, k, p, m in rows:
        buf.write(f"{s},{k},{p:.6f},{m:.6f}\n")
    arr = np.array([[r[1], r[2], r[3]] for r in rows], dtype=float)
    mean = arr.mean(axis=0)
    std = arr.std(axis=0)
    buf.write(f"mean,{mean[0]:.2f},{mean[1]:.6f},{mean[2]:.6f}\n")
    buf.write(f"stddev,{std[0]:.2f},{std[1]:.6f},{std[2]:.6f}\n")
    csv_text = buf.getvalue()
    sweep_path = Path(base.outdir) / "sweep.csv"
    sweep_path.parent.mkdir(parents=True, exist_ok=True)
    sweep_path.write_text(csv_text, encoding="utf-8")
    return csv_text


BENCH_HEADER = "n,d,knn_s,cluster_s,metrics_s,summarize_s,total_s,threads,knn_scaling_vs_1thread"


def _warm_louvain_kernel() -> None:
    # first Louvain call pays the JIT compile; keep that out of the timings
    from .knn import KnnGraph

    tiny = KnnGraph.from_edges(3, np.array([0, 1]), np.array([1, 2]), np.array([1.0, 1.0]))
    louvain_mod.louvain_cluster(tiny, seed=0)


def run_bench(
    sizes: list[tuple[int, int]],
    mode: str = "louvain",
    kmeans_k: int | None = None,
    knn_k: int = 15,
    n_clusters: int = 5,
    separation: float = 8.0,
    threads: int | None = None,
    seed: int = 0,
    measure_scaling: bool = True,
) -> str:
    """Time each stage on synthetic data of the given (n, d) sizes.

    The scaling column re-times the knn stage single-threaded and
    reports t(1 thread) / t(pool); it is left blank when scaling
    measurement is disabled or the mode never builds a graph.
    """
    if mode not in ("kmeans", "louvain"):
        raise ConfigError(f"mode must be 'kmeans' or 'louvain', got {mode!r}")
    if mode == "kmeans" and (kmeans_k is None or kmeans_k < 1):
        raise ConfigError("mode=kmeans requires kmeans_k >= 1")
    if mode == "louvain" and sizes:
        _warm_louvain_kernel()
    lines = [BENCH_HEADER]
    for n, d in sizes:
        spec = MixtureSpec(
            n_clusters=n_clusters, n_items=n, dim=d, separation=separation, seed=seed
        )
        matrix, labels, corpus = generate(spec)
        knn_s = 0.0
        scaling = ""
        if mode == "louvain":
            t0 = time.perf_counter()
            neighbors = knn_search(matrix, k=knn_k, threads=threads)
            knn_s = time.perf_counter() - t0
            if measure_scaling:
                t0 = time.perf_counter()
                knn_search(matrix, k=knn_k, threads=1)
                t_single = time.perf_counter() - t0
                scaling = f"{t_single / knn_s:.2f}"
            graph = build_graph(neighbors)
            t0 = time.perf_counter()
            part = louvain_mod.louvain_cluster(graph, seed=seed).final
            cluster_s = time.perf_counter() - t0
        else:
            t0 = time.perf_counter()
            _, part = kmeans_mod.kmeans_fit(matrix, k=kmeans_k, seed=seed)
            cluster_s = time.perf_counter() - t0
        t0 = time.perf_counter()
        evaluate(part, labels)
        metrics_s = time.perf_counter() - t0
        t0 = time.perf_counter()
        build_cluster_reports(part, corpus=corpus, matrix=matrix)
        summarize_s = time.perf_counter() - t0
        total = knn_s + cluster_s + metrics_s + summarize_s
        lines.append(
            f"{n},{d},{knn_s:.4f},{cluster_s:.4f},{metrics_s:.4f},{summarize_s:.4f},"
            f"{total:.4f},{threads if threads is not None else 'all'},{scaling}"
        )
    return "\n".join(lines) + "\n"
