"""Embedding, corpus and label storage.

Embeddings travel as dense float32 matrices in a small binary container:

    bytes 0..8   magic ``EMBV0001``
    bytes 8..16  u64 little-endian number of rows
    bytes 16..24 u64 little-endian dimension
    bytes 24..   rows * dim little-endian IEEE-754 float32, row-major

The raw payload is a plain C-order float32 array, so a file can be
memory-mapped directly (``load_embeddings(path, mmap=True)``).

Texts and optional labels live in a separate UTF-8 JSONL file, one object
per line with required fields ``id`` (int) and ``text`` (str) and an
optional ``label`` (str); records align with embedding rows by position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataFormatError

EMBEDDING_MAGIC = b"EMBV0001"
_HEADER_BYTES = len(EMBEDDING_MAGIC) + 16


@dataclass(frozen=True)
class TextCorpus:
    """Raw texts with stable integer ids, aligned to embedding rows by index."""

    ids: np.ndarray  # int64, unique
    texts: list[str]

    def __post_init__(self):
        if len(self.ids) != len(self.texts):
            raise DataFormatError("ids and texts must have the same length")

    def __len__(self) -> int:
        return len(self.texts)


@dataclass(frozen=True)
class LabelSet:
    """Per-item ground-truth class indices in ``[0, n_classes)``."""

    labels: np.ndarray  # int64
    n_classes: int
    class_names: list[str] | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_classes):
            raise DataFormatError("label index out of range for n_classes")
        if self.class_names is not None and len(self.class_names) != self.n_classes:
            raise DataFormatError("class_names length must equal n_classes")

    def __len__(self) -> int:
        return len(self.labels)


def validate_embeddings(matrix: np.ndarray) -> np.ndarray:
    """Check shape, dtype and finiteness; returns the matrix as C-order float32."""
    matrix = np.ascontiguousarray(matrix, dtype=np.float32)
    if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
        raise DataFormatError(
            f"embedding matrix must be 2-D with at least one row and column, got shape {matrix.shape}"
        )
    finite_rows = np.isfinite(matrix).all(axis=1)
    if not finite_rows.all():
        bad = int(np.flatnonzero(~finite_rows)[0])
        raise DataFormatError(f"non-finite embedding value in row {bad}")
    return matrix


def save_embeddings(matrix: np.ndarray, path: str | Path) -> None:
    """Write a matrix to the binary embedding format; round-trips bit-exactly."""
    matrix = validate_embeddings(matrix)
    n, d = matrix.shape
    header = EMBEDDING_MAGIC + np.array([n, d], dtype="<u8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(matrix.astype("<f4", copy=False).tobytes())


def load_embeddings(path: str | Path, mmap: bool = False) -> np.ndarray:
    """Load a binary embedding file into an (n, dim) float32 array.

    With ``mmap=True`` the payload is memory-mapped read-only instead of
    copied; finiteness is still validated up front.
    """
    path = Path(path)
    size = path.stat().st_size
    with open(path, "rb") as fh:
        head = fh.read(_HEADER_BYTES)
    if len(head) < _HEADER_BYTES or head[:8] != EMBEDDING_MAGIC:
        raise DataFormatError(f"{path}: not an embedding file (bad magic or truncated header)")
    n, d = (int(x) for x in np.frombuffer(head[8:], dtype="<u8"))
    if n < 1 or d < 1:
        raise DataFormatError(f"{path}: header declares empty matrix ({n} x {d})")
    expected = _HEADER_BYTES + 4 * n * d
    if size != expected:
        raise DataFormatError(
            f"{path}: payload size mismatch, header says {n} x {d} "
            f"({expected} bytes) but file has {size} bytes"
        )
    if mmap:
        matrix = np.memmap(path, dtype="<f4", mode="r", offset=_HEADER_BYTES, shape=(n, d))
    else:
        with open(path, "rb") as fh:
            fh.seek(_HEADER_BYTES)
            matrix = np.fromfile(fh, dtype="<f4", count=n * d).reshape(n, d)
    finite_rows = np.isfinite(matrix).all(axis=1)
    if not finite_rows.all():
        bad = int(np.flatnonzero(~finite_rows)[0])
        raise DataFormatError(f"{path}: non-finite embedding value in row {bad}")
    return matrix


def save_corpus(path: str | Path, corpus: TextCorpus, labels: LabelSet | None = None) -> None:
    """Write a corpus (and optional aligned labels) as JSONL."""
    if labels is not None and len(labels) != len(corpus):
        raise DataFormatError("labels are not aligned with the corpus")
    names = labels.class_names if labels is not None else None
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(len(corpus)):
            rec = {"id": int(corpus.ids[i]), "text": corpus.texts[i]}
            if labels is not None:
                cls = int(labels.labels[i])
                rec["label"] = names[cls] if names else str(cls)
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def load_corpus(path: str | Path) -> tuple[TextCorpus, LabelSet | None]:
    """Read a JSONL corpus file.

    Returns the corpus plus a LabelSet when every record carries a ``label``
    field (class indices follow sorted label-name order). Malformed records
    are reported with their 1-based line number.
    """
    ids: list[int] = []
    texts: list[str] = []
    raw_labels: list[str] = []
    seen: set[int] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(rec, dict) or "id" not in rec or "text" not in rec:
                raise DataFormatError(f"{path}:{lineno}: record must have 'id' and 'text' fields")
            if not isinstance(rec["id"], int) or isinstance(rec["id"], bool):
                raise DataFormatError(f"{path}:{lineno}: 'id' must be an integer")
            if not isinstance(rec["text"], str):
                raise DataFormatError(f"{path}:{lineno}: 'text' must be a string")
            if rec["id"] in seen:
                raise DataFormatError(f"{path}:{lineno}: duplicate id {rec['id']}")
            seen.add(rec["id"])
            ids.append(rec["id"])
            texts.append(rec["text"])
            if "label" in rec:
                raw_labels.append(str(rec["label"]))
    if not ids:
        raise DataFormatError(f"{path}: corpus file has no records")
    corpus = TextCorpus(ids=np.asarray(ids, dtype=np.int64), texts=texts)
    labels = None
    if len(raw_labels) == len(ids):
        names = sorted(set(raw_labels))
        index = {name: i for i, name in enumerate(names)}
        labels = LabelSet(
            labels=np.array([index[v] for v in raw_labels], dtype=np.int64),
            n_classes=len(names),
            class_names=names,
        )
    return corpus, labels


def stratified_sample(
    labels: LabelSet,
    fraction: float,
    min_per_class: int = 1,
    seed: int = 0,
) -> np.ndarray:
    """Pick a label-stratified subset of item indices.

    Per-class quotas are ``fraction * class_size`` floored, with the
    leftover items handed to the classes with the largest fractional
    parts (ties broken by class index), so the subset matches the class
    proportions to within rounding. Every class then contributes at
    least ``min(min_per_class, class_size)`` items. Sampling within a
    class is uniform without replacement and deterministic for a seed.
    """
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"fraction must be in (0, 1), got {fraction}")
    y = labels.labels
    n = len(y)
    counts = np.bincount(y, minlength=labels.n_classes)
    if (counts == 0).any():
        raise ConfigError("every class must have at least one member")

    quotas = fraction * counts
    base = np.floor(quotas).astype(np.int64)
    leftover = int(round(fraction * n)) - int(base.sum())
    if leftover > 0:
        frac_part = quotas - base
        # argsort on (-fractional part, class index): stable sort is ascending
        # by class index within equal keys
        order = np.argsort(-frac_part, kind="stable")
        base[order[:leftover]] += 1
    take = np.maximum(base, np.minimum(min_per_class, counts))
    take = np.minimum(take, counts)

    rng = np.random.default_rng(seed)
    picked: list[np.ndarray] = []
    for cls in range(labels.n_classes):
        members = np.flatnonzero(y == cls)
        picked.append(rng.choice(members, size=int(take[cls]), replace=False))
    return np.sort(np.concatenate(picked))
