import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from embedcluster import (
    DataFormatError,
    LabelSet,
    Partition,
    contingency,
    evaluate,
    nmi,
    purity,
)
from oracles import brute_nmi, brute_purity


class TestContingency:
    def test_identity_diagonal(self):
        table = contingency([0, 0, 1, 1], [0, 0, 1, 1])
        assert np.array_equal(table.counts, [[2, 0], [0, 2]])
        assert table.total == 4

    def test_all_in_one_row(self):
        table = contingency([0, 0, 0, 0], [0, 0, 1, 1])
        assert table.counts.shape == (1, 2)
        assert list(table.counts[0]) == [2, 2]

    def test_matches_pairwise_count_oracle(self):
        rng = np.random.default_rng(0)
        pred = rng.integers(0, 7, 1000)
        truth = rng.integers(0, 5, 1000)
        table = contingency(pred, truth)
        for k in range(7):
            for j in range(5):
                naive = sum(1 for a, b in zip(pred, truth) if a == k and b == j)
                assert table.counts[k, j] == naive
        assert np.array_equal(table.pred_marginals, np.bincount(pred, minlength=7))
        assert np.array_equal(table.true_marginals, np.bincount(truth, minlength=5))

    def test_size_mismatch(self):
        with pytest.raises(DataFormatError):
            contingency([0, 1], [0, 1, 1])

    def test_accepts_domain_types(self):
        part = Partition.from_assignment(np.array([0, 0, 1, 1]))
        labels = LabelSet(labels=np.array([0, 1, 1, 1]), n_classes=2)
        assert purity(part, labels) == 0.75


class TestPurity:
    def test_identity(self):
        assert purity([0, 1, 2, 0], [0, 1, 2, 0]) == 1.0

    def test_singletons_are_pure(self):
        assert purity([0, 1, 2, 3], [0, 0, 1, 1]) == 1.0

    def test_hand_case(self):
        # clusters {a,b} and {c,d} vs classes {a},{b,c,d}:
        # (max(1,1) + max(0,2)) / 4
        assert purity([0, 0, 1, 1], [0, 1, 1, 1]) == 0.75

    def test_relabel_invariance(self):
        rng = np.random.default_rng(1)
        pred = rng.integers(0, 4, 200)
        truth = rng.integers(0, 3, 200)
        persp = np.array([2, 0, 3, 1])[pred]  # permute cluster ids
        assert purity(pred, truth) == purity(persp, truth)


class TestNmi:
    def test_identical_nondegenerate(self):
        assert nmi([0, 0, 1, 1, 2], [0, 0, 1, 1, 2]) == 1.0

    def test_independent(self):
        assert nmi([0, 1, 0, 1], [0, 0, 1, 1]) == 0.0

    def test_hand_case(self):
        # frozen from the explicit 2x2 table computation:
        # I = .25 ln2 + .25 ln(2/3) + .5 ln(4/3) = 0.215762
        # H(pred) = ln 2 = 0.693147, H(true) = 0.562335
        assert nmi([0, 0, 1, 1], [0, 1, 1, 1]) == pytest.approx(0.3437, abs=1e-3)

    def test_symmetry(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            a = rng.integers(0, 5, 100)
            b = rng.integers(0, 4, 100)
            assert nmi(a, b) == pytest.approx(nmi(b, a), abs=1e-12)

    def test_singletons_penalized(self):
        # purity rewards shattering; NMI is the corrective
        pred = list(range(8))
        truth = [0, 0, 0, 0, 1, 1, 1, 1]
        assert purity(pred, truth) == 1.0
        assert nmi(pred, truth) < 1.0

    def test_degenerate_conventions(self):
        assert nmi([0, 0, 0], [0, 0, 0]) == 1.0  # both trivial, identical
        assert nmi([0, 0, 0], [0, 1, 2]) == 0.0  # one trivial
        assert nmi([0, 1, 2], [0, 0, 0]) == 0.0

    def test_relabel_invariance(self):
        rng = np.random.default_rng(3)
        pred = rng.integers(0, 4, 150)
        truth = rng.integers(0, 3, 150)
        relabeled = np.array([3, 1, 0, 2])[pred]
        assert nmi(pred, truth) == pytest.approx(nmi(relabeled, truth), abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(min_value=2, max_value=60),
        kp=st.integers(min_value=1, max_value=6),
        kt=st.integers(min_value=1, max_value=6),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    def test_range_property(self, n, kp, kt, seed):
        rng = np.random.default_rng(seed)
        pred = rng.integers(0, kp, n)
        truth = rng.integers(0, kt, n)
        value = nmi(pred, truth)
        assert 0.0 <= value <= 1.0
        assert 0.0 <= purity(pred, truth) <= 1.0


class TestAgainstBruteForce:
    def test_thousand_random_pairs(self):
        rng = np.random.default_rng(7)
        for _ in range(200):  # acceptance runs the full 1000
            n = int(rng.integers(2, 200))
            pred = rng.integers(0, int(rng.integers(1, 11)), n)
            truth = rng.integers(0, int(rng.integers(1, 11)), n)
            assert purity(pred, truth) == pytest.approx(brute_purity(pred, truth), abs=1e-9)
            assert nmi(pred, truth) == pytest.approx(brute_nmi(pred, truth), abs=1e-9)


class TestEvaluate:
    def test_identity_bundle(self):
        report = evaluate([0, 1, 2, 1], [0, 1, 2, 1])
        assert report.purity == 1.0
        assert report.nmi == 1.0
        assert report.n_clusters_pred == 3
        assert report.n_classes_truth == 3

    def test_all_in_one_balanced(self):
        report = evaluate([0, 0, 0, 0], [0, 0, 1, 1])
        assert report.purity == 0.5
        assert report.nmi == 0.0
        assert report.n_clusters_pred == 1
        assert report.n_classes_truth == 2

    def test_composition(self):
        rng = np.random.default_rng(4)
        pred = rng.integers(0, 5, 80)
        truth = rng.integers(0, 4, 80)
        report = evaluate(pred, truth)
        assert report.purity == purity(pred, truth)
        assert report.nmi == nmi(pred, truth)

    def test_serialization(self):
        report = evaluate([0, 0, 1, 1], [0, 1, 1, 1])
        assert '"purity": 0.75' in report.to_json()
        row = report.to_csv_row().strip().split(",")
        assert row[0] == "2"
        assert float(row[1]) == 0.75
