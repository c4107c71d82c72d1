import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from embedcluster import (
    ConfigError,
    DataFormatError,
    LabelSet,
    load_corpus,
    load_embeddings,
    save_corpus,
    save_embeddings,
    stratified_sample,
)
from embedcluster.store import EMBEDDING_MAGIC, TextCorpus


class TestEmbeddingIO:
    def test_small_roundtrip(self, tmp_path):
        m = np.array([[0.5]], dtype=np.float32)
        save_embeddings(m, tmp_path / "m.emb")
        assert np.array_equal(load_embeddings(tmp_path / "m.emb"), m)

    def test_header_then_payload(self, tmp_path):
        m = np.arange(6, dtype=np.float32).reshape(2, 3)
        path = tmp_path / "m.emb"
        save_embeddings(m, path)
        raw = path.read_bytes()
        assert raw[:8] == EMBEDDING_MAGIC
        n, d = np.frombuffer(raw[8:24], dtype="<u8")
        assert (n, d) == (2, 3)
        assert np.array_equal(load_embeddings(path), m)

    def test_random_roundtrip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(42)
        m = rng.standard_normal((100, 64)).astype(np.float32)
        save_embeddings(m, tmp_path / "r.emb")
        got = load_embeddings(tmp_path / "r.emb")
        assert got.dtype == np.float32
        assert np.array_equal(got.view(np.uint32), m.view(np.uint32))

    @settings(max_examples=25, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=20),
        d=st.integers(min_value=1, max_value=20),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    def test_roundtrip_property(self, tmp_path_factory, n, d, seed):
        rng = np.random.default_rng(seed)
        m = (rng.standard_normal((n, d)) * rng.uniform(1e-4, 1e4)).astype(np.float32)
        path = tmp_path_factory.mktemp("emb") / "m.emb"
        save_embeddings(m, path)
        assert np.array_equal(load_embeddings(path), m)

    def test_mmap_load(self, tmp_path):
        m = np.arange(12, dtype=np.float32).reshape(3, 4)
        save_embeddings(m, tmp_path / "m.emb")
        got = load_embeddings(tmp_path / "m.emb", mmap=True)
        assert np.array_equal(np.asarray(got), m)

    def test_payload_size_mismatch(self, tmp_path):
        path = tmp_path / "bad.emb"
        header = EMBEDDING_MAGIC + np.array([2, 3], dtype="<u8").tobytes()
        path.write_bytes(header + np.zeros(5, dtype="<f4").tobytes())
        with pytest.raises(DataFormatError, match="size mismatch"):
            load_embeddings(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.emb"
        path.write_bytes(b"NOTMAGIC" + bytes(16))
        with pytest.raises(DataFormatError, match="magic"):
            load_embeddings(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "bad.emb"
        path.write_bytes(EMBEDDING_MAGIC[:4])
        with pytest.raises(DataFormatError):
            load_embeddings(path)

    def test_nonfinite_reports_row(self, tmp_path):
        m = np.ones((4, 2), dtype=np.float32)
        m[2, 1] = np.nan
        path = tmp_path / "nan.emb"
        header = EMBEDDING_MAGIC + np.array([4, 2], dtype="<u8").tobytes()
        path.write_bytes(header + m.tobytes())
        with pytest.raises(DataFormatError, match="row 2"):
            load_embeddings(path)

    def test_save_rejects_nonfinite(self, tmp_path):
        m = np.array([[1.0], [np.inf]], dtype=np.float32)
        with pytest.raises(DataFormatError, match="row 1"):
            save_embeddings(m, tmp_path / "x.emb")

    def test_save_unwritable_path(self, tmp_path):
        m = np.ones((1, 1), dtype=np.float32)
        with pytest.raises(OSError):
            save_embeddings(m, tmp_path / "nope" / "x.emb")


class TestCorpusIO:
    def test_three_records(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(
            '{"id": 0, "text": "alpha"}\n{"id": 1, "text": "beta"}\n{"id": 2, "text": "gamma"}\n'
        )
        corpus, labels = load_corpus(path)
        assert len(corpus) == 3
        assert list(corpus.ids) == [0, 1, 2]
        assert corpus.texts == ["alpha", "beta", "gamma"]
        assert labels is None

    def test_missing_text_field_reports_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": 0, "text": "ok"}\n{"id": 1}\n')
        with pytest.raises(DataFormatError, match=":2:"):
            load_corpus(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": 7, "text": "a"}\n{"id": 7, "text": "b"}\n')
        with pytest.raises(DataFormatError, match="duplicate id 7"):
            load_corpus(path)

    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": 0, "text": "a"}\n{oops\n')
        with pytest.raises(DataFormatError, match=":2:"):
            load_corpus(path)

    def test_labels_on_all_lines(self, tmp_path):
        # distinct label count fixed by independent construction
        path = tmp_path / "c.jsonl"
        rows = [
            {"id": i, "text": f"t{i}", "label": lab}
            for i, lab in enumerate(["spam", "ham", "spam", "eggs", "ham"])
        ]
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        corpus, labels = load_corpus(path)
        assert labels is not None
        assert labels.n_classes == len({r["label"] for r in rows})
        assert labels.class_names == ["eggs", "ham", "spam"]
        # label indices follow sorted class-name order
        assert list(labels.labels) == [2, 1, 2, 0, 1]

    def test_partial_labels_gives_none(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": 0, "text": "a", "label": "x"}\n{"id": 1, "text": "b"}\n')
        _, labels = load_corpus(path)
        assert labels is None

    def test_corpus_roundtrip(self, tmp_path):
        corpus = TextCorpus(ids=np.array([3, 1, 4]), texts=["a b", "c", "d e f"])
        labels = LabelSet(labels=np.array([0, 1, 0]), n_classes=2, class_names=["x", "y"])
        save_corpus(tmp_path / "c.jsonl", corpus, labels)
        got, got_labels = load_corpus(tmp_path / "c.jsonl")
        assert got.texts == corpus.texts
        assert list(got.ids) == [3, 1, 4]
        assert list(got_labels.labels) == [0, 1, 0]


class TestStratifiedSample:
    def test_two_classes_half(self):
        labels = LabelSet(labels=np.array([0, 0, 1, 1]), n_classes=2)
        idx = stratified_sample(labels, fraction=0.5, min_per_class=1, seed=1)
        assert len(idx) == 2
        assert set(labels.labels[idx]) == {0, 1}

    def test_exact_arithmetic_quota(self):
        # 10 classes x 1000 items at 0.025 -> exactly 25 each
        labels = LabelSet(labels=np.repeat(np.arange(10), 1000), n_classes=10)
        idx = stratified_sample(labels, fraction=0.025, min_per_class=1, seed=0)
        counts = np.bincount(labels.labels[idx], minlength=10)
        assert np.array_equal(counts, np.full(10, 25))

    def test_validation_split_proportions(self):
        # 1,008 items from 270,599 at realistic uneven class proportions:
        # per-class counts stay within +-1 of the real-valued quota
        rng = np.random.default_rng(5)
        proportions = np.array([0.33, 0.25, 0.20, 0.147, 0.073])
        sizes = np.floor(proportions * 270_599).astype(int)
        sizes[0] += 270_599 - sizes.sum()
        y = np.repeat(np.arange(5), sizes)
        rng.shuffle(y)
        labels = LabelSet(labels=y, n_classes=5)
        fraction = 1008 / 270_599
        idx = stratified_sample(labels, fraction=fraction, min_per_class=10, seed=9)
        counts = np.bincount(labels.labels[idx], minlength=5)
        assert abs(len(idx) - 1008) <= 1
        for c in range(5):
            assert abs(counts[c] - fraction * sizes[c]) <= 1.0

    def test_min_per_class(self):
        labels = LabelSet(labels=np.array([0] * 100 + [1] * 3), n_classes=2)
        idx = stratified_sample(labels, fraction=0.05, min_per_class=2, seed=0)
        counts = np.bincount(labels.labels[idx], minlength=2)
        assert counts[1] >= 2

    def test_min_per_class_capped_at_class_size(self):
        labels = LabelSet(labels=np.array([0] * 50 + [1]), n_classes=2)
        idx = stratified_sample(labels, fraction=0.1, min_per_class=5, seed=0)
        counts = np.bincount(labels.labels[idx], minlength=2)
        assert counts[1] == 1

    def test_deterministic_for_seed(self):
        labels = LabelSet(labels=np.random.default_rng(0).integers(0, 4, 500), n_classes=4)
        a = stratified_sample(labels, fraction=0.2, seed=123)
        b = stratified_sample(labels, fraction=0.2, seed=123)
        c = stratified_sample(labels, fraction=0.2, seed=124)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_fraction_out_of_range(self):
        labels = LabelSet(labels=np.array([0, 1]), n_classes=2)
        for bad in (0.0, 1.0, -0.3, 1.5):
            with pytest.raises(ConfigError):
                stratified_sample(labels, fraction=bad)

    @settings(max_examples=30, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=10_000),
        fraction=st.floats(min_value=0.05, max_value=0.95),
        m=st.integers(min_value=1, max_value=5),
    )
    def test_min_per_class_property(self, seed, fraction, m):
        rng = np.random.default_rng(seed)
        y = rng.integers(0, 5, 400)
        y[:5] = np.arange(5)  # every class inhabited
        labels = LabelSet(labels=y, n_classes=5)
        idx = stratified_sample(labels, fraction=fraction, min_per_class=m, seed=seed)
        counts = np.bincount(y[idx], minlength=5)
        class_sizes = np.bincount(y, minlength=5)
        assert (counts >= np.minimum(m, class_sizes)).all()
        assert len(np.unique(idx)) == len(idx)
