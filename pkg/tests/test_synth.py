import numpy as np
import pytest

from embedcluster import ConfigError, MixtureSpec, generate, planted_graph
from oracles import count_intra_inter_edges, naive_knn


class TestMixtureSpec:
    def test_rejects_more_clusters_than_items(self):
        with pytest.raises(ConfigError):
            MixtureSpec(n_clusters=10, n_items=5, dim=4)

    def test_rejects_bad_separation(self):
        with pytest.raises(ConfigError):
            MixtureSpec(n_clusters=2, n_items=10, dim=4, separation=0.0)

    def test_rejects_bad_imbalance(self):
        with pytest.raises(ConfigError):
            MixtureSpec(n_clusters=2, n_items=10, dim=4, imbalance=(0.5, 0.6))
        with pytest.raises(ConfigError):
            MixtureSpec(n_clusters=2, n_items=10, dim=4, imbalance=(1.0,))


class TestGenerate:
    def test_single_cluster_all_label_zero(self):
        x, labels, corpus = generate(MixtureSpec(n_clusters=1, n_items=50, dim=8, seed=0))
        assert (labels.labels == 0).all()
        assert x.shape == (50, 8)
        assert x.dtype == np.float32
        assert len(corpus) == 50

    def test_high_separation_nearest_neighbor_accuracy(self):
        spec = MixtureSpec(n_clusters=5, n_items=1000, dim=32, separation=50.0, seed=3)
        x, labels, _ = generate(spec)
        ids, _ = naive_knn(x, k=1)
        accuracy = (labels.labels[ids[:, 0]] == labels.labels).mean()
        assert accuracy >= 0.999

    def test_quota_sizes_exact(self):
        spec = MixtureSpec(
            n_clusters=2, n_items=1000, dim=8, imbalance=(0.9, 0.1), seed=1, size_mode="quota"
        )
        _, labels, _ = generate(spec)
        counts = np.bincount(labels.labels)
        assert list(counts) == [900, 100]

    def test_multinomial_sizes_approximate(self):
        spec = MixtureSpec(
            n_clusters=2,
            n_items=1000,
            dim=8,
            imbalance=(0.9, 0.1),
            seed=1,
            size_mode="multinomial",
        )
        _, labels, _ = generate(spec)
        counts = np.bincount(labels.labels)
        assert abs(counts[0] - 900) < 50  # ~5 sigma of Binomial(1000, .9)

    def test_deterministic_for_seed(self):
        spec = MixtureSpec(n_clusters=3, n_items=200, dim=16, seed=11)
        x1, l1, c1 = generate(spec)
        x2, l2, c2 = generate(spec)
        assert np.array_equal(x1, x2)
        assert np.array_equal(l1.labels, l2.labels)
        assert c1.texts == c2.texts
        x3, _, _ = generate(MixtureSpec(n_clusters=3, n_items=200, dim=16, seed=12))
        assert not np.array_equal(x1, x3)

    def test_center_geometry(self):
        # orthonormal frame: pairwise center distances equal `separation`
        spec = MixtureSpec(n_clusters=4, n_items=40_000, dim=16, separation=20.0, seed=5)
        x, labels, _ = generate(spec)
        centers = np.vstack(
            [x[labels.labels == c].astype(np.float64).mean(axis=0) for c in range(4)]
        )
        for a in range(4):
            for b in range(a + 1, 4):
                d = np.linalg.norm(centers[a] - centers[b])
                # empirical centers drift by ~ sqrt(dim/n_c) ~ 0.04
                assert d == pytest.approx(20.0, abs=0.2)

    def test_unit_noise_scale(self):
        spec = MixtureSpec(n_clusters=2, n_items=20_000, dim=8, separation=30.0, seed=7)
        x, labels, _ = generate(spec)
        member = x[labels.labels == 0].astype(np.float64)
        centered = member - member.mean(axis=0)
        cov = centered.T @ centered / (len(member) - 1)
        np.testing.assert_allclose(np.diag(cov), np.ones(8), atol=0.1)
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() < 0.1

    def test_texts_carry_cluster_signature(self):
        _, labels, corpus = generate(MixtureSpec(n_clusters=3, n_items=90, dim=8, seed=2))
        for i, text in enumerate(corpus.texts):
            c = labels.labels[i]
            assert text.startswith(f"topic{c}a topic{c}b")

    def test_more_clusters_than_dims_still_works(self):
        spec = MixtureSpec(n_clusters=6, n_items=600, dim=3, separation=40.0, seed=4)
        x, labels, _ = generate(spec)
        ids, _ = naive_knn(x, k=1)
        accuracy = (labels.labels[ids[:, 0]] == labels.labels).mean()
        assert accuracy >= 0.95  # approximate placement, still well separated


class TestPlantedGraph:
    def test_high_separation_few_inter_edges(self):
        spec = MixtureSpec(n_clusters=4, n_items=800, dim=16, separation=50.0, seed=9)
        graph, labels = planted_graph(spec, k=10)
        intra, inter = count_intra_inter_edges(graph, labels.labels)
        assert inter / (intra + inter) < 0.01

    def test_zero_separation_limit_independent_edges(self):
        # separation ~ 0: neighbor classes are random, inter-class edge
        # fraction approaches 1 - 1/n_clusters
        spec = MixtureSpec(n_clusters=4, n_items=2000, dim=16, separation=1e-6, seed=10)
        graph, labels = planted_graph(spec, k=10)
        intra, inter = count_intra_inter_edges(graph, labels.labels)
        frac = inter / (intra + inter)
        assert frac == pytest.approx(1 - 1 / 4, abs=0.05)

    def test_two_items_single_edge(self):
        spec = MixtureSpec(n_clusters=1, n_items=2, dim=4, seed=0)
        graph, _ = planted_graph(spec, k=1)
        assert graph.n_edges == 1
