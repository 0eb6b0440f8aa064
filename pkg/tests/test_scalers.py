import numpy as np
import pytest

from radbench.analytics import FeatureTable, TableError, fit_scaler, scale


def table_of(values, split=None, columns=None):
    values = np.asarray(values, dtype=np.float64)
    return FeatureTable(
        rows=[f"r{i}" for i in range(values.shape[0])],
        columns=columns or [f"f{j}" for j in range(values.shape[1])],
        values=values,
        split=split or [],
    )


class TestScalers:
    def test_max_abs(self):
        out, _ = scale(table_of([[-2.0], [4.0]]), "max-abs")
        assert out.values.ravel().tolist() == [-0.5, 1.0]

    def test_min_max(self):
        out, _ = scale(table_of([[0.0], [5.0], [10.0]]), "min-max")
        assert out.values.ravel().tolist() == [0.0, 0.5, 1.0]

    def test_standard_constant_column(self):
        out, _ = scale(table_of([[3.0, 1.0], [3.0, 2.0]]), "standard")
        assert np.all(out.values[:, 0] == 0.0)

    def test_normalizer_row(self):
        out, _ = scale(table_of([[3.0, 4.0], [0.0, 0.0]]), "normalizer")
        assert out.values[0].tolist() == [0.6, 0.8]
        assert out.values[1].tolist() == [0.0, 0.0]  # zero rows unchanged

    def test_fit_on_train_rows_only(self):
        t = table_of([[0.0], [10.0], [100.0]], split=["train", "train", "validation"])
        out, fitted = scale(t, "min-max")
        # fitted on {0, 10}: validation row scales beyond 1
        assert out.values.ravel().tolist() == [0.0, 1.0, 10.0]
        assert out.rows == t.rows and out.columns == t.columns

    def test_apply_aligns_by_name(self):
        t = table_of([[1.0, 10.0], [2.0, 20.0]], columns=["a", "b"])
        _, fitted = scale(t, "max-abs")
        permuted = table_of([[10.0, 1.0]], columns=["b", "a"])
        out = fitted.apply(permuted)
        assert out.columns == ["a", "b"]
        assert out.values.ravel().tolist() == [0.5, 0.5]

    def test_apply_missing_column(self):
        _, fitted = scale(table_of([[1.0, 2.0]], columns=["a", "b"]), "standard")
        with pytest.raises(TableError, match="missing columns"):
            fitted.apply(table_of([[1.0]], columns=["a"]))

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown scaler"):
            fit_scaler(table_of([[1.0]]), "zscore")
