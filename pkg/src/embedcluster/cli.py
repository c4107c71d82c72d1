"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
error. Flags win over values from ``--config`` JSON files; the
``EMBEDCLUSTER_THREADS`` and ``EMBEDCLUSTER_OUTROOT`` environment
variables supply defaults for the thread count and output root.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click

from . import kmeans as kmeans_mod
from . import louvain as louvain_mod
from .errors import ConfigError, DataFormatError
from .knn import build_graph, degree_stats, knn_search, load_edgelist, save_edgelist
from .metrics import evaluate
from .partition import load_partition, save_partition
from .pipeline import PipelineConfig, run_bench, run_pipeline, run_sweep
from .store import load_corpus, save_corpus, save_embeddings, load_embeddings
from .stopwords import DEFAULT_STOPWORDS, load_stopwords
from .summarize import build_cluster_reports, save_reports_csv, save_reports_json
from .synth import MixtureSpec, generate


def guarded(fn):
    """Map exceptions onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)
        except (DataFormatError, FileNotFoundError) as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(3)
        except click.ClickException:
            raise
        except Exception as exc:  # pragma: no cover - defensive
            click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(4)

    return wrapper


def _env_threads(threads: int | None) -> int | None:
    if threads is not None:
        return threads
    env = os.environ.get("EMBEDCLUSTER_THREADS")
    return int(env) if env else None


def _env_outdir(outdir: str) -> str:
    root = os.environ.get("EMBEDCLUSTER_OUTROOT")
    if root and not Path(outdir).is_absolute():
        return str(Path(root) / outdir)
    return outdir


def _parse_sample_cap(value: str | None):
    if value is None or value == "auto":
        return "auto"
    if value == "none":
        return None
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"--sample-cap must be an int, 'auto' or 'none', got {value!r}")


@click.group()
def main():
    """Clustering engine for dense text-embedding matrices."""


@main.command("synth")
@click.option("--clusters", type=int, default=5, show_default=True)
@click.option("--items", type=int, default=1000, show_default=True)
@click.option("--dim", type=int, default=64, show_default=True)
@click.option("--separation", type=float, default=8.0, show_default=True)
@click.option("--imbalance", type=str, default=None, help="Comma-separated proportions summing to 1.")
@click.option("--size-mode", type=click.Choice(["quota", "multinomial"]), default="quota")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-embeddings", type=click.Path(), required=True)
@click.option("--out-corpus", type=click.Path(), default=None, help="Also write texts + labels as JSONL.")
@guarded
def synth_cmd(clusters, items, dim, separation, imbalance, size_mode, seed, out_embeddings, out_corpus):
    """Generate planted-mixture embeddings (and optionally a corpus)."""
    proportions = None
    if imbalance:
        proportions = tuple(float(p) for p in imbalance.split(","))
    spec = MixtureSpec(
        n_clusters=clusters,
        n_items=items,
        dim=dim,
        separation=separation,
        imbalance=proportions,
        seed=seed,
        size_mode=size_mode,
    )
    matrix, labels, corpus = generate(spec)
    save_embeddings(matrix, out_embeddings)
    click.echo(f"wrote {matrix.shape[0]} x {matrix.shape[1]} embeddings to {out_embeddings}")
    if out_corpus:
        save_corpus(out_corpus, corpus, labels)
        click.echo(f"wrote corpus with labels to {out_corpus}")


@main.command("knn")
@click.option("--embeddings", type=click.Path(exists=True), required=True)
@click.option("--k", type=int, default=15, show_default=True)
@click.option("--block-size", type=int, default=512, show_default=True)
@click.option("--threads", type=int, default=None)
@click.option("--weighting", type=click.Choice(["unit", "inverse-distance", "gaussian"]), default="gaussian")
@click.option("--sigma", type=float, default=None, help="Gaussian bandwidth; default = median neighbor distance.")
@click.option("--out", type=click.Path(), required=True, help="Edge-list output path.")
@guarded
def knn_cmd(embeddings, k, block_size, threads, weighting, sigma, out):
    """Build the symmetrized k-NN graph and dump it as an edge list."""
    matrix = load_embeddings(embeddings)
    neighbors = knn_search(matrix, k=k, block_size=block_size, threads=_env_threads(threads))
    graph = build_graph(neighbors, weighting=weighting, sigma=sigma)
    save_edgelist(graph, out)
    stats = degree_stats(graph)
    click.echo(
        f"graph: {graph.n_nodes} nodes, {stats.n_edges} edges, "
        f"degree min/mean/max = {stats.min_degree}/{stats.mean_degree:.2f}/{stats.max_degree}"
    )


@main.command("kmeans")
@click.option("--embeddings", type=click.Path(exists=True), required=True)
@click.option("--k", type=int, required=True)
@click.option("--init", type=click.Choice(["kmeans++", "random"]), default="kmeans++")
@click.option("--sample-cap", type=str, default="auto", show_default=True)
@click.option("--max-iter", type=int, default=100, show_default=True)
@click.option("--tol", type=float, default=1e-4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--outdir", type=click.Path(), default="out", show_default=True)
@guarded
def kmeans_cmd(embeddings, k, init, sample_cap, max_iter, tol, seed, outdir):
    """Cluster with k-means (cluster count known)."""
    outdir = Path(_env_outdir(outdir))
    outdir.mkdir(parents=True, exist_ok=True)
    matrix = load_embeddings(embeddings)
    model, part = kmeans_mod.kmeans_fit(
        matrix, k=k, init=init, sample_cap=_parse_sample_cap(sample_cap),
        max_iter=max_iter, tol=tol, seed=seed,
    )
    save_partition(part, outdir / "partition.txt")
    kmeans_mod.save_model(model, outdir / "model.emb")
    click.echo(
        f"k={k} inertia={model.inertia:.4f} iterations={model.iterations_run} "
        f"sample_size={model.sample_size} -> {outdir}"
    )


@main.command("louvain")
@click.option("--graph", type=click.Path(exists=True), default=None, help="Edge-list input.")
@click.option("--embeddings", type=click.Path(exists=True), default=None, help="Build the graph first.")
@click.option("--k", type=int, default=15, show_default=True, help="k-NN k when building from embeddings.")
@click.option("--weighting", type=click.Choice(["unit", "inverse-distance", "gaussian"]), default="gaussian")
@click.option("--sigma", type=float, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--resolution", type=float, default=1.0, show_default=True)
@click.option("--min-gain", type=float, default=1e-6, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--dump-hierarchy", is_flag=True, help="Write one partition file per pass.")
@click.option("--outdir", type=click.Path(), default="out", show_default=True)
@guarded
def louvain_cmd(graph, embeddings, k, weighting, sigma, threads, resolution, min_gain, seed,
                dump_hierarchy, outdir):
    """Cluster with Louvain community detection (cluster count unknown)."""
    if (graph is None) == (embeddings is None):
        raise ConfigError("provide exactly one of --graph or --embeddings")
    outdir = Path(_env_outdir(outdir))
    outdir.mkdir(parents=True, exist_ok=True)
    if graph is not None:
        g = load_edgelist(graph)
    else:
        matrix = load_embeddings(embeddings)
        neighbors = knn_search(matrix, k=k, threads=_env_threads(threads))
        g = build_graph(neighbors, weighting=weighting, sigma=sigma)
    result = louvain_mod.louvain_cluster(
        g, resolution=resolution, seed=seed, min_modularity_gain=min_gain
    )
    save_partition(result.final, outdir / "partition.txt")
    if dump_hierarchy:
        for lvl, part in enumerate(result.levels):
            save_partition(part, outdir / f"level_{lvl}.txt")
        hierarchy = {
            "n_passes": result.n_passes,
            "modularity_trace": [float(q) for q in result.modularity_trace],
            "levels": [f"level_{i}.txt" for i in range(result.n_passes)],
        }
        (outdir / "hierarchy.json").write_text(json.dumps(hierarchy, indent=2) + "\n")
    click.echo(
        f"passes={result.n_passes} clusters={result.final.n_clusters} "
        f"modularity={result.modularity_trace[-1]:.4f} -> {outdir}"
    )


@main.command("eval")
@click.option("--partition", "partition_path", type=click.Path(exists=True), required=True)
@click.option("--labels", "labels_path", type=click.Path(exists=True), required=True,
              help="Corpus-format JSONL with label fields.")
@click.option("--out", type=click.Path(), default=None, help="Write the quality report JSON here.")
@guarded
def eval_cmd(partition_path, labels_path, out):
    """Score a partition against ground-truth labels (purity, NMI)."""
    part = load_partition(partition_path)
    _, labels = load_corpus(labels_path)
    if labels is None:
        raise DataFormatError(f"{labels_path} has no label fields")
    report = evaluate(part, labels)
    if out:
        Path(out).write_text(report.to_json() + "\n", encoding="utf-8")
    click.echo(report.to_json())


@main.command("summarize")
@click.option("--corpus", type=click.Path(exists=True), required=True)
@click.option("--partition", "partition_path", type=click.Path(exists=True), required=True)
@click.option("--embeddings", type=click.Path(exists=True), default=None,
              help="Needed for representative items.")
@click.option("--stopwords", "stopwords_path", type=click.Path(exists=True), default=None)
@click.option("--min-term-frequency", type=int, default=2, show_default=True)
@click.option("--top-bigrams", type=int, default=10, show_default=True)
@click.option("--representatives", type=int, default=3, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="Report JSON path.")
@click.option("--csv", "csv_path", type=click.Path(), default=None, help="Optional CSV flattening.")
@guarded
def summarize_cmd(corpus, partition_path, embeddings, stopwords_path, min_term_frequency,
                  top_bigrams, representatives, out, csv_path):
    """Per-cluster frequent terms, top bigrams and representative items."""
    corp, _ = load_corpus(corpus)
    part = load_partition(partition_path)
    matrix = load_embeddings(embeddings) if embeddings else None
    stop = load_stopwords(stopwords_path) if stopwords_path else DEFAULT_STOPWORDS
    reports = build_cluster_reports(
        part, corpus=corp, matrix=matrix, stopwords=stop,
        min_term_frequency=min_term_frequency, top_bigrams=top_bigrams,
        representatives_per_cluster=representatives,
    )
    save_reports_json(reports, out)
    if csv_path:
        save_reports_csv(reports, csv_path)
    click.echo(f"wrote {len(reports)} cluster reports to {out}")


_PIPELINE_FIELDS = [
    ("embeddings", str), ("corpus", str), ("labels", str), ("mode", str),
    ("kmeans_k", int), ("knn_k", int), ("weighting", str), ("sigma", float),
    ("kmeans_init", str), ("max_iter", int), ("tol", float), ("resolution", float),
    ("min_modularity_gain", float), ("stopwords_file", str), ("min_term_frequency", int),
    ("top_bigrams", int), ("representatives_per_cluster", int), ("seed", int),
    ("outdir", str), ("threads", int), ("block_size", int),
]


def _pipeline_options(fn):
    for name, typ in reversed(_PIPELINE_FIELDS):
        flag = "--" + name.replace("_", "-")
        fn = click.option(flag, name, type=typ, default=None)(fn)
    return fn


def _build_config(config_path, sample_cap, dump_graph, kwargs) -> PipelineConfig:
    data = {}
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{config_path}: invalid JSON ({exc.msg})")
        if not isinstance(data, dict):
            raise ConfigError(f"{config_path}: config must be a JSON object")
    for name, value in kwargs.items():
        if value is not None:
            data[name] = value  # explicit flags win over the config file
    if sample_cap is not None:
        data["sample_cap"] = _parse_sample_cap(sample_cap)
    if dump_graph:
        data["dump_graph"] = True
    if "threads" not in data:
        env = _env_threads(None)
        if env is not None:
            data["threads"] = env
    if "embeddings" not in data:
        raise ConfigError("an embeddings path is required (flag or config file)")
    data["outdir"] = _env_outdir(data.get("outdir", "out"))
    return PipelineConfig.from_dict(data)


@main.command("pipeline")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file; explicit flags override it.")
@click.option("--sample-cap", type=str, default=None)
@click.option("--dump-graph", is_flag=True)
@_pipeline_options
@guarded
def pipeline_cmd(config_path, sample_cap, dump_graph, **kwargs):
    """Run the full flow: cluster, score (if labels), report."""
    config = _build_config(config_path, sample_cap, dump_graph, kwargs)
    manifest = run_pipeline(config)
    click.echo(manifest.to_json())


@main.command("sweep")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--sample-cap", type=str, default=None)
@click.option("--repeats", type=int, default=5, show_default=True)
@click.option("--seeds", type=str, default=None, help="Comma-separated seed list; overrides --repeats.")
@_pipeline_options
@guarded
def sweep_cmd(config_path, sample_cap, repeats, seeds, **kwargs):
    """Repeat a pipeline run across seeds and aggregate quality scores."""
    config = _build_config(config_path, sample_cap, False, kwargs)
    seed_list = [int(s) for s in seeds.split(",")] if seeds else None
    click.echo(run_sweep(config, repeats=repeats, seeds=seed_list), nl=False)


@main.command("bench")
@click.option("--sizes", type=str, required=True,
              help="Comma-separated NxD pairs, e.g. '1000x64,10000x128'. Empty string allowed.")
@click.option("--mode", type=click.Choice(["kmeans", "louvain"]), default="louvain")
@click.option("--k", "kmeans_k", type=int, default=None, help="Cluster count for kmeans mode.")
@click.option("--knn-k", type=int, default=15, show_default=True)
@click.option("--threads", type=int, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--no-scaling", is_flag=True, help="Skip the single-thread re-run of the knn stage.")
@guarded
def bench_cmd(sizes, mode, kmeans_k, knn_k, threads, seed, no_scaling):
    """Time pipeline stages on synthetic data of increasing size."""
    parsed: list[tuple[int, int]] = []
    if sizes.strip():
        for chunk in sizes.split(","):
            try:
                n, d = chunk.lower().split("x")
                parsed.append((int(n), int(d)))
            except ValueError:
                raise ConfigError(f"bad size {chunk!r}, expected NxD")
    click.echo(
        run_bench(
            parsed, mode=mode, kmeans_k=kmeans_k, knn_k=knn_k,
            threads=_env_threads(threads), seed=seed, measure_scaling=not no_scaling,
        ),
        nl=False,
    )


if __name__ == "__main__":
    main()
