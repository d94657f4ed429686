import io

import numpy as np
import pytest

from v2gen.bench import knn_classify, leave_one_out_accuracy, sweep, write_sweep_csv
from v2gen.shapes import make_toy_dataset
from v2gen.views import V2Config


class TestKnnClassify:
    def test_nearest_point(self):
        train = [(np.array([0.0, 0.0]), "A"), (np.array([1.0, 1.0]), "B")]
        assert knn_classify(train, np.array([0.1, 0.0]), k=1) == "A"

    def test_exact_match(self):
        train = [(np.array([0.0, 0.0]), "A"), (np.array([1.0, 1.0]), "B")]
        assert knn_classify(train, np.array([1.0, 1.0]), k=1) == "B"

    def test_majority(self):
        train = [
            (np.array([0.0]), "A"),
            (np.array([0.1]), "A"),
            (np.array([0.2]), "B"),
            (np.array([5.0]), "B"),
        ]
        assert knn_classify(train, np.array([0.0]), k=3) == "A"

    def test_distance_tie_lower_index_wins(self):
        train = [(np.array([1.0]), "A"), (np.array([-1.0]), "B")]
        assert knn_classify(train, np.array([0.0]), k=1) == "A"

    def test_vote_tie_goes_to_nearest(self):
        train = [
            (np.array([0.1]), "B"),
            (np.array([0.2]), "A"),
            (np.array([0.3]), "A"),
            (np.array([0.4]), "B"),
        ]
        # k=4: two A, two B; B owns the nearest member of the tied set
        assert knn_classify(train, np.array([0.0]), k=4) == "B"

    def test_dimension_mismatch(self):
        train = [(np.array([0.0, 0.0]), "A")]
        with pytest.raises(ValueError):
            knn_classify(train, np.array([0.0]), k=1)

    def test_k_bounds(self):
        train = [(np.array([0.0]), "A")]
        with pytest.raises(ValueError):
            knn_classify(train, np.array([0.0]), k=2)


class TestLeaveOneOut:
    def test_matches_knn_classify(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(20, 4))
        labels = ["A" if i % 2 else "B" for i in range(20)]
        acc = leave_one_out_accuracy(X, labels, k=3)
        correct = 0
        for i in range(20):
            train = [(X[j], labels[j]) for j in range(20) if j != i]
            if knn_classify(train, X[i], k=3) == labels[i]:
                correct += 1
        assert acc == pytest.approx(correct / 20)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(30, 6))
        labels = [f"c{i % 3}" for i in range(30)]
        acc1 = leave_one_out_accuracy(X, labels, k=3)
        perm = rng.permutation(30)
        acc2 = leave_one_out_accuracy(X[perm], [labels[i] for i in perm], k=3)
        assert acc1 == pytest.approx(acc2)


@pytest.fixture(scope="module")
def small_sweep():
    dataset = make_toy_dataset(["box", "icosphere", "torus"], 4, seed=3)
    base = V2Config(m=1, n=4, x=10, y=10)
    return sweep(dataset, base, ["depth"], k=3)


class TestSweep:
    def test_one_row_per_divisor(self, small_sweep):
        assert [row.f for row in small_sweep] == [1, 2, 5, 10]

    def test_budget_identity(self, small_sweep):
        for row in small_sweep:
            assert row.nv * row.pv * row.config.nc == row.c == 400

    def test_rows_ordered_by_views(self, small_sweep):
        nvs = [row.nv for row in small_sweep]
        assert nvs == sorted(nvs)

    def test_accuracy_in_range(self, small_sweep):
        assert all(0.0 <= row.accuracy <= 1.0 for row in small_sweep)

    def test_identical_meshes_score_perfectly(self):
        dataset = make_toy_dataset(["box"], 2, seed=0)
        mesh = dataset[0][0]
        pairs = [(mesh, "X"), (mesh, "X"), (mesh, "X")]
        rows = sweep(pairs, V2Config(m=1, n=1, x=4, y=4), ["depth"], k=1)
        assert all(row.accuracy == 1.0 for row in rows)

    def test_too_few_per_class(self):
        dataset = make_toy_dataset(["box", "torus"], 2, seed=0)[:3]
        with pytest.raises(ValueError, match=">= 2"):
            sweep(dataset, V2Config(m=1, n=1, x=2, y=2), ["depth"], k=1)

    def test_csv_output(self, small_sweep):
        buf = io.StringIO()
        write_sweep_csv(small_sweep, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "config,f,NV,PV,C,accuracy"
        assert len(lines) == 1 + len(small_sweep)
        first = lines[1].split(",")
        assert first[0] == "1x4x10x10"
        assert first[1:5] == ["1", "4", "100", "400"]
