"""Storage layer walkthrough: embedding files, corpora, stratified subsets.

Embeddings live in a small binary container (magic + row/dim header +
raw little-endian float32), so loading a million-row matrix is one
header parse plus a bulk read, and memory-mapping works. Texts and
labels ride in a separate JSONL file aligned by row index.
"""

import tempfile
from pathlib import Path

import numpy as np

from embedcluster import (
    LabelSet,
    load_corpus,
    load_embeddings,
    save_corpus,
    save_embeddings,
    stratified_sample,
)
from embedcluster.store import TextCorpus

workdir = Path(tempfile.mkdtemp(prefix="embedcluster_demo_"))
print(f"working in {workdir}\n")

# --- binary embedding round trip -------------------------------------
rng = np.random.default_rng(0)
matrix = rng.standard_normal((1000, 64)).astype(np.float32)
emb_path = workdir / "vectors.emb"
save_embeddings(matrix, emb_path)
loaded = load_embeddings(emb_path)
print(f"wrote {emb_path.stat().st_size} bytes for a {matrix.shape} matrix")
print(f"bit-exact round trip: {np.array_equal(loaded, matrix)}")

# memory-mapped access reads the payload lazily
mapped = load_embeddings(emb_path, mmap=True)
print(f"mmap row 123 equals in-memory row: {np.array_equal(mapped[123], matrix[123])}\n")

# --- corpus with labels -----------------------------------------------
texts = [f"document number {i}" for i in range(1000)]
labels = LabelSet(
    labels=rng.integers(0, 4, 1000),
    n_classes=4,
    class_names=["billing", "shipping", "returns", "account"],
)
corpus = TextCorpus(ids=np.arange(1000), texts=texts)
corpus_path = workdir / "corpus.jsonl"
save_corpus(corpus_path, corpus, labels)
reloaded_corpus, reloaded_labels = load_corpus(corpus_path)
print(f"corpus: {len(reloaded_corpus)} records, classes = {reloaded_labels.class_names}")

# --- stratified subsets -----------------------------------------------
# quotas follow class proportions (largest-remainder rounding) and every
# class keeps at least min_per_class items
subset = stratified_sample(reloaded_labels, fraction=0.05, min_per_class=10, seed=7)
counts = np.bincount(reloaded_labels.labels[subset], minlength=4)
print(f"5% stratified subset: {len(subset)} items, per-class counts {counts.tolist()}")
print(f"full per-class counts {np.bincount(reloaded_labels.labels).tolist()}")
