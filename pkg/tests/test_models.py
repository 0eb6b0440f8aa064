import warnings

import numpy as np
import pytest

from radbench.analytics import (
    DEFAULT_GRIDS,
    FeatureTable,
    SingleClassError,
    ensemble_predict,
    grid_search_cv,
    train_classifier,
)
from radbench.analytics.models import (
    LogisticRegressionImpl,
    SvmImpl,
    stratified_folds,
)

ALL_KINDS = ("logistic-regression", "svm", "decision-tree", "random-forest", "adaboost")


def blob_table(rng, n=80, d=4, gap=4.0, split="train"):
    half = n // 2
    x = np.vstack([rng.normal(0, 1, (half, d)), rng.normal(gap, 1, (half, d))])
    return FeatureTable(
        rows=[f"r{i}" for i in range(n)],
        columns=[f"f{j}" for j in range(d)],
        values=x,
        labels=[0] * half + [1] * half,
        split=[split] * n,
    )


def xor_table():
    x = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 10, dtype=float)
    y = (x[:, 0] != x[:, 1]).astype(int).tolist()
    return FeatureTable([f"x{i}" for i in range(40)], ["a", "b"], x, y, ["train"] * 40)


class TestClassifiers:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_separable_blobs_perfect(self, kind, rng):
        t = blob_table(rng)
        model = train_classifier(t, kind)
        scores = model.predict_scores(t)
        y = np.array([l == model.classes[1] for l in t.labels])
        assert ((scores >= 0.5) == y).mean() == 1.0
        assert scores.min() >= 0.0 and scores.max() <= 1.0

    def test_xor(self):
        t = xor_table()
        y = np.array(t.labels, dtype=bool)
        linear = train_classifier(t, "svm", {"kernel": "linear"})
        acc_linear = ((linear.predict_scores(t) >= 0.5) == y).mean()
        assert acc_linear <= 0.6
        tree = train_classifier(t, "decision-tree", {"max_depth": 2})
        acc_tree = ((tree.predict_scores(t) >= 0.5) == y).mean()
        assert acc_tree == 1.0
        rbf = train_classifier(t, "svm", {"kernel": "rbf", "gamma": 1.0})
        assert ((rbf.predict_scores(t) >= 0.5) == y).mean() == 1.0

    def test_single_class_error(self, rng):
        t = FeatureTable(["a", "b"], ["f"], rng.normal(size=(2, 1)), [1, 1], ["train"] * 2)
        for kind in ALL_KINDS:
            with pytest.raises((SingleClassError, Exception)):
                train_classifier(t, kind)

    def test_nan_features_error(self):
        t = FeatureTable(["a", "b"], ["f"], np.array([[0.0], [1.0]]), [0, 1], ["train"] * 2)
        t.values[0, 0] = 0.0
        model = train_classifier(t, "logistic-regression")
        bad = np.array([[np.nan]])
        # NaN rejected at fit time
        from radbench.analytics.models import _check_xy
        with pytest.raises(ValueError, match="NaN"):
            _check_xy(bad, np.array([0.0]))

    def test_forest_deterministic(self, rng):
        t = blob_table(rng, gap=1.5)
        a = train_classifier(t, "random-forest", {"seed": 7})
        b = train_classifier(t, "random-forest", {"seed": 7})
        assert np.array_equal(a.predict_scores(t), b.predict_scores(t))

    def test_column_alignment_by_name(self, rng):
        t = blob_table(rng)
        model = train_classifier(t, "logistic-regression")
        permuted = FeatureTable(t.rows, list(reversed(t.columns)),
                                t.values[:, ::-1], t.labels, t.split)
        assert np.allclose(model.predict_scores(t), model.predict_scores(permuted))


class TestLogisticGradient:
    def test_gradient_matches_finite_differences(self, rng):
        x = rng.normal(size=(30, 1))
        y = (x[:, 0] + rng.normal(0, 0.5, 30) > 0).astype(float)
        impl = LogisticRegressionImpl(c=2.0)
        ys = np.where(y > 0.5, 1.0, -1.0)
        w = rng.normal(size=1)
        b = 0.3
        _, gw, gb = impl._loss_grad(x, ys, w, b)
        eps = 1e-6
        for j in range(1):
            wp, wm = w.copy(), w.copy()
            wp[j] += eps
            wm[j] -= eps
            fd = (impl._loss_grad(x, ys, wp, b)[0] - impl._loss_grad(x, ys, wm, b)[0]) / (2 * eps)
            assert gw[j] == pytest.approx(fd, rel=1e-5)
        fd_b = (impl._loss_grad(x, ys, w, b + eps)[0] - impl._loss_grad(x, ys, w, b - eps)[0]) / (2 * eps)
        assert gb == pytest.approx(fd_b, rel=1e-5)

    def test_converges_to_small_gradient(self, rng):
        x = rng.normal(size=(50, 3))
        y = (x @ np.array([1.0, -2.0, 0.5]) > 0).astype(float)
        impl = LogisticRegressionImpl().fit(x, y)
        ys = np.where(y > 0.5, 1.0, -1.0)
        _, gw, gb = impl._loss_grad(x, ys, impl.w, impl.b)
        assert np.sqrt(gw @ gw + gb * gb) <= 1e-5


class TestSvm:
    def test_kkt_conditions_hold(self, rng):
        x = rng.normal(size=(40, 2))
        y = (x[:, 0] + x[:, 1] > 0).astype(float)
        if len(np.unique(y)) < 2:
            y[0] = 1 - y[0]
        impl = SvmImpl(c=1.0, kernel="linear").fit(x, y)
        ys = np.where(y > 0.5, 1.0, -1.0)
        f = impl.decision(x)
        alpha = np.abs(impl.alpha_y)
        # KKT within tolerance: margin violations only where alpha = C
        for i in range(len(y)):
            margin = ys[i] * f[i]
            if alpha[i] < 1e-9:
                assert margin >= 1 - 1e-2
            elif alpha[i] > 1.0 - 1e-9:
                assert margin <= 1 + 1e-2

    def test_platt_scores_in_unit_interval(self, rng):
        x = rng.normal(size=(30, 3))
        y = (x[:, 0] > 0).astype(float)
        if len(np.unique(y)) < 2:
            y[0] = 1 - y[0]
        impl = SvmImpl(kernel="rbf").fit(x, y)
        s = impl.predict_scores(x)
        assert np.all((0 <= s) & (s <= 1))


class TestGridSearch:
    def test_single_cell_equals_direct(self, rng):
        t = blob_table(rng, n=60, gap=2.0)
        grid = [{"kernel": "linear", "c": 1.0}]
        gm = grid_search_cv(t, "svm", grid, folds=3)
        direct = train_classifier(t, "svm", grid[0])
        assert np.allclose(gm.predict_scores(t), direct.predict_scores(t))

    def test_cv_table_row_count(self, rng):
        t = blob_table(rng, n=60)
        grid = DEFAULT_GRIDS["decision-tree"]
        gm = grid_search_cv(t, "decision-tree", grid, folds=5)
        assert len(gm.cv_table) == len(grid) * 5

    def test_absurd_cell_skipped_with_warning(self, rng):
        t = blob_table(rng, n=40)
        grid = [{"max_depth": 0}, {"max_depth": 3}]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            gm = grid_search_cv(t, "decision-tree", grid, folds=3)
        assert gm.hyperparameters == {"max_depth": 3}
        assert any("skipped" in str(w.message) for w in caught)

    def test_winner_has_max_mean_auc(self, rng):
        t = blob_table(rng, n=80, gap=1.0)
        gm = grid_search_cv(t, "logistic-regression", folds=4)
        by_cell = {}
        for row in gm.cv_table:
            by_cell.setdefault(row["cell"], []).append(row["auc"])
        means = {c: np.mean([a for a in v if a is not None]) for c, v in by_cell.items()}
        winner_mean = max(means.values())
        grid = DEFAULT_GRIDS["logistic-regression"]
        winner_cell = grid.index(gm.hyperparameters)
        assert means[winner_cell] == pytest.approx(winner_mean)

    def test_stratified_folds_cover_all(self, rng):
        y = np.array([0] * 13 + [1] * 7, dtype=float)
        folds = stratified_folds(y, 5, seed=1)
        joined = np.sort(np.concatenate(folds))
        assert np.array_equal(joined, np.arange(20))
        for f in folds:
            assert 0 < len(f) < 20


class TestEnsemble:
    def test_averaging(self, rng):
        t = blob_table(rng)

        class Fake:
            def __init__(self, value):
                self.value = value
                self.classes = [0, 1]

            def predict_scores(self, data):
                n = data.n_rows if hasattr(data, "n_rows") else len(data)
                return np.full(n, self.value)

        assert ensemble_predict([Fake(0.2), Fake(0.6)], t, "averaging")[0] == pytest.approx(0.4)
        votes = ensemble_predict([Fake(0.9), Fake(0.8), Fake(0.1)], t, "voting")
        assert votes[0] == pytest.approx(2 / 3)

    def test_single_model_identity(self, rng):
        t = blob_table(rng)
        m = train_classifier(t, "logistic-regression")
        assert np.allclose(ensemble_predict([m], t, "averaging"), m.predict_scores(t))
