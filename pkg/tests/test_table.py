import numpy as np
import pytest

from radbench.analytics import FeatureTable, TableError, read_table, split_random, write_table


def toy_table(n=10, d=3, labels=None, split=None):
    rng = np.random.default_rng(7)
    return FeatureTable(
        rows=[f"r{i}" for i in range(n)],
        columns=[f"f{j}" for j in range(d)],
        values=rng.normal(size=(n, d)),
        labels=labels or [],
        split=split or [],
    )


class TestFeatureTable:
    def test_invariants(self):
        with pytest.raises(TableError):
            FeatureTable(["a", "a"], ["f"], np.zeros((2, 1)))
        with pytest.raises(TableError):
            FeatureTable(["a"], ["f", "f"], np.zeros((1, 2)))
        with pytest.raises(TableError):
            FeatureTable(["a"], ["f"], np.array([[np.inf]]))
        with pytest.raises(TableError):
            FeatureTable(["a"], ["f"], np.zeros((1, 1)), split=["nope"])

    def test_select_columns_missing(self):
        t = toy_table()
        with pytest.raises(TableError, match="missing columns"):
            t.select_columns(["f0", "zzz"])

    def test_binary_labels(self):
        t = toy_table(4, labels=["b", "m", "b", "m"])
        y, classes = t.binary_labels()
        assert classes == ["b", "m"]
        assert y.tolist() == [0.0, 1.0, 0.0, 1.0]
        t3 = toy_table(3, labels=["a", "b", "c"])
        with pytest.raises(TableError):
            t3.binary_labels()


class TestSplitRandom:
    def test_424_to_339_85(self):
        t = toy_table(424, labels=["a"] * 212 + ["b"] * 212)
        out = split_random(t, 0.8, seed=0)
        assert len(out.split_indices("train")) == 339
        assert len(out.split_indices("validation")) == 85

    def test_fraction_one_all_train(self):
        out = split_random(toy_table(10), 1.0, seed=0)
        assert len(out.split_indices("train")) == 10

    def test_deterministic(self):
        t = toy_table(50)
        a = split_random(t, 0.7, seed=42)
        b = split_random(t, 0.7, seed=42)
        assert a.split == b.split
        c = split_random(t, 0.7, seed=43)
        assert a.split != c.split

    def test_manual_assignment_preserved(self):
        split = ["test"] * 3 + ["unassigned"] * 7
        t = toy_table(10, split=split)
        out = split_random(t, 0.5, seed=1)
        assert out.split[:3] == ["test"] * 3
        assert len(out.split_indices("train")) == 3  # floor(0.5 * 7)

    def test_stratified_proportions(self):
        labels = ["a"] * 30 + ["b"] * 10
        t = toy_table(40, labels=labels)
        out = split_random(t, 0.75, seed=5, stratified=True)
        tr = set(out.split_indices("train").tolist())
        a_train = sum(1 for i in tr if labels[i] == "a")
        b_train = sum(1 for i in tr if labels[i] == "b")
        assert abs(a_train - 22.5) <= 1
        assert abs(b_train - 7.5) <= 1
        assert len(tr) == 30

    def test_stratified_small_class_error(self):
        t = toy_table(5, labels=["a", "a", "a", "a", "b"])
        with pytest.raises(TableError, match="< 2 samples"):
            split_random(t, 0.6, seed=0, stratified=True)


class TestCsvRoundTrip:
    def test_bit_exact(self, tmp_path, rng):
        t = FeatureTable(
            rows=["x", "y", "z"],
            columns=["a", "b"],
            values=rng.normal(size=(3, 2)),
            labels=["pos", None, "neg"],
            split=["train", "validation", "unassigned"],
        )
        path = tmp_path / "t.csv"
        write_table(t, path)
        back = read_table(path)
        assert back.rows == t.rows
        assert back.columns == t.columns
        assert np.array_equal(back.values, t.values)  # repr round-trip is exact
        assert back.labels == t.labels
        assert back.split == t.split
        # a second write is byte-identical
        path2 = tmp_path / "t2.csv"
        write_table(back, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_malformed(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("nope,label\n")
        with pytest.raises(TableError):
            read_table(p)
