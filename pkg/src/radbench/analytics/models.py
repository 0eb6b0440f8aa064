"""Classifiers trained from scratch: L2 logistic regression (gradient descent
with backtracking line search), SVM via SMO (linear/RBF, Platt-calibrated),
CART decision tree, random forest, and AdaBoost (SAMME over stumps).

All models expose predict_scores() in [0, 1] for the positive class
(classes[1] of the sorted label values).  Everything is deterministic given
the seed hyperparameter.
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np

from .table import FeatureTable, TableError

MODEL_KINDS = ("logistic-regression", "svm", "decision-tree", "random-forest", "adaboost")


class SingleClassError(ValueError):
    pass


def _check_xy(x: np.ndarray, y: np.ndarray):
    if np.isnan(x).any():
        raise ValueError("NaN features in training data")
    if len(np.unique(y)) < 2:
        raise SingleClassError("training set contains a single class")


# --- logistic regression --------------------------------------------------------


class LogisticRegressionImpl:
    """L2-penalized logistic regression; full-batch gradient descent with
    Armijo backtracking, tol 1e-6 on the gradient norm, <= 1000 iterations.
    The intercept is unpenalized."""

    def __init__(self, c: float = 1.0, tol: float = 1e-6, max_iter: int = 1000):
        if c <= 0:
            raise ValueError(f"C must be > 0, got {c}")
        self.c = c
        self.tol = tol
        self.max_iter = max_iter
        self.w: np.ndarray | None = None
        self.b = 0.0

    def _loss_grad(self, x, ys, w, b):
        z = x @ w + b
        m = ys * z
        # stable log(1 + exp(-m))
        loss = float(np.mean(np.logaddexp(0.0, -m))) + 0.5 / self.c * float(w @ w)
        sig = 1.0 / (1.0 + np.exp(np.clip(m, -500, 500)))
        gw = -(x * (ys * sig)[:, None]).mean(axis=0) + w / self.c
        gb = float(-(ys * sig).mean())
        return loss, gw, gb

    def fit(self, x, y, sample_weight=None):
        _check_xy(x, y)
        ys = np.where(y > 0.5, 1.0, -1.0)
        w = np.zeros(x.shape[1])
        b = 0.0
        loss, gw, gb = self._loss_grad(x, ys, w, b)
        step = 1.0
        for _ in range(self.max_iter):
            gnorm = float(np.sqrt(gw @ gw + gb * gb))
            if gnorm <= self.tol:
                break
            step = min(step * 2.0, 1e4)  # allow re-growth after conservative steps
            while step > 1e-16:
                w2 = w - step * gw
                b2 = b - step * gb
                loss2, gw2, gb2 = self._loss_grad(x, ys, w2, b2)
                if loss2 <= loss - 1e-4 * step * gnorm ** 2:  # Armijo
                    break
                step *= 0.5
            w, b, loss, gw, gb = w2, b2, loss2, gw2, gb2
        self.w, self.b = w, b
        return self

    def decision(self, x):
        return x @ self.w + self.b

    def predict_scores(self, x):
        return 1.0 / (1.0 + np.exp(-np.clip(self.decision(x), -500, 500)))


class LassoLogisticImpl:
    """L1 logistic regression by proximal gradient (ISTA with soft
    thresholding); used by select-from-model and RFE-LASSO."""

    def __init__(self, lam: float = 0.01, max_iter: int = 500, tol: float = 1e-7):
        self.lam = lam
        self.max_iter = max_iter
        self.tol = tol
        self.w: np.ndarray | None = None
        self.b = 0.0

    def fit(self, x, y, sample_weight=None, w0=None, b0=0.0):
        _check_xy(x, y)
        ys = np.where(y > 0.5, 1.0, -1.0)
        n = len(ys)
        # Lipschitz constant of the mean logistic gradient
        lip = float(np.linalg.norm(x, 2) ** 2) / (4.0 * n) + 1e-12
        step = 1.0 / lip
        w = np.zeros(x.shape[1]) if w0 is None else w0.copy()
        b = b0
        for _ in range(self.max_iter):
            m = ys * (x @ w + b)
            sig = 1.0 / (1.0 + np.exp(np.clip(m, -500, 500)))
            gw = -(x * (ys * sig)[:, None]).mean(axis=0)
            gb = float(-(ys * sig).mean())
            w_new = w - step * gw
            w_new = np.sign(w_new) * np.maximum(np.abs(w_new) - step * self.lam, 0.0)
            b_new = b - step * gb
            delta = float(np.abs(w_new - w).max(initial=0.0) + abs(b_new - b))
            w, b = w_new, b_new
            if delta <= self.tol:
                break
        self.w, self.b = w, b
        return self

    def decision(self, x):
        return x @ self.w + self.b

    def predict_scores(self, x):
        return 1.0 / (1.0 + np.exp(-np.clip(self.decision(x), -500, 500)))


def lasso_logistic_path(x, y, lambdas) -> list[np.ndarray]:
    """Coefficient path over a descending lambda grid (warm-started)."""
    coefs = []
    w, b = None, 0.0
    for lam in lambdas:
        model = LassoLogisticImpl(lam=lam).fit(x, y, w0=w, b0=b)
        w, b = model.w, model.b
        coefs.append(w.copy())
    return coefs


# --- SVM (SMO) ------------------------------------------------------------------


class SvmImpl:
    """Binary SVM trained with Platt's SMO on the full kernel matrix,
    tol 1e-3; scores via a Platt-style sigmoid fitted on train decisions."""

    def __init__(self, c: float = 1.0, kernel: str = "rbf", gamma="scale",
                 tol: float = 1e-3, max_epochs: int = 200):
        if kernel not in ("linear", "rbf"):
            raise ValueError(f"kernel must be linear|rbf, got {kernel!r}")
        if c <= 0:
            raise ValueError(f"C must be > 0, got {c}")
        self.c = c
        self.kernel = kernel
        self.gamma = gamma
        self.tol = tol
        self.max_epochs = max_epochs

    def _kernel(self, a, b):
        if self.kernel == "linear":
            return a @ b.T
        d2 = (np.sum(a * a, axis=1)[:, None] + np.sum(b * b, axis=1)[None, :]
              - 2.0 * a @ b.T)
        return np.exp(-self._gamma_value * np.maximum(d2, 0.0))

    def fit(self, x, y, sample_weight=None):
        _check_xy(x, y)
        ys = np.where(y > 0.5, 1.0, -1.0)
        self._gamma_value = (
            1.0 / (x.shape[1] * max(x.var(), 1e-12)) if self.gamma == "scale"
            else float(self.gamma)
        )
        self.x_train = x
        k = self._kernel(x, x)
        n = len(ys)
        alpha = np.zeros(n)
        b = 0.0
        err = -ys.astype(np.float64)  # f(x_i) - y_i with f = 0 initially
        c, tol = self.c, self.tol
        eps = 1e-12

        def take_step(i1, i2):
            nonlocal b
            if i1 == i2:
                return False
            a1, a2 = alpha[i1], alpha[i2]
            y1, y2 = ys[i1], ys[i2]
            e1, e2 = err[i1], err[i2]
            s = y1 * y2
            if s > 0:
                lo, hi = max(0.0, a1 + a2 - c), min(c, a1 + a2)
            else:
                lo, hi = max(0.0, a2 - a1), min(c, c + a2 - a1)
            if lo >= hi - eps:
                return False
            k11, k12, k22 = k[i1, i1], k[i1, i2], k[i2, i2]
            eta = k11 + k22 - 2.0 * k12
            if eta > eps:
                a2_new = a2 + y2 * (e1 - e2) / eta
                a2_new = min(max(a2_new, lo), hi)
            else:
                # objective at the clip bounds
                f1 = y1 * (e1 + b) - a1 * k11 - s * a2 * k12
                f2 = y2 * (e2 + b) - s * a1 * k12 - a2 * k22
                l1 = a1 + s * (a2 - lo)
                h1 = a1 + s * (a2 - hi)
                lobj = (l1 * f1 + lo * f2 + 0.5 * l1 ** 2 * k11
                        + 0.5 * lo ** 2 * k22 + s * lo * l1 * k12)
                hobj = (h1 * f1 + hi * f2 + 0.5 * h1 ** 2 * k11
                        + 0.5 * hi ** 2 * k22 + s * hi * h1 * k12)
                if lobj < hobj - eps:
                    a2_new = lo
                elif lobj > hobj + eps:
                    a2_new = hi
                else:
                    a2_new = a2
            if abs(a2_new - a2) < eps * (a2_new + a2 + eps):
                return False
            a1_new = a1 + s * (a2 - a2_new)
            b1 = e1 + y1 * (a1_new - a1) * k11 + y2 * (a2_new - a2) * k12 + b
            b2 = e2 + y1 * (a1_new - a1) * k12 + y2 * (a2_new - a2) * k22 + b
            if 0 < a1_new < c:
                b_new = b1
            elif 0 < a2_new < c:
                b_new = b2
            else:
                b_new = (b1 + b2) / 2.0
            alpha[i1], alpha[i2] = a1_new, a2_new
            err[:] += (y1 * (a1_new - a1) * k[i1] + y2 * (a2_new - a2) * k[i2]
                       + (b - b_new))
            b = b_new
            return True

        def examine(i2):
            y2, a2, e2 = ys[i2], alpha[i2], err[i2]
            r2 = e2 * y2
            if (r2 < -tol and a2 < c) or (r2 > tol and a2 > 0):
                non_bound = np.flatnonzero((alpha > eps) & (alpha < c - eps))
                if len(non_bound) > 1:
                    i1 = int(non_bound[np.argmax(np.abs(err[non_bound] - e2))])
                    if take_step(i1, i2):
                        return True
                for i1 in non_bound:
                    if take_step(int(i1), i2):
                        return True
                for i1 in range(len(ys)):
                    if take_step(i1, i2):
                        return True
            return False

        num_changed = 0
        examine_all = True
        epochs = 0
        while (num_changed > 0 or examine_all) and epochs < self.max_epochs:
            num_changed = 0
            if examine_all:
                for i in range(n):
                    num_changed += examine(i)
            else:
                for i in np.flatnonzero((alpha > eps) & (alpha < c - eps)):
                    num_changed += examine(int(i))
            if examine_all:
                examine_all = False
            elif num_changed == 0:
                examine_all = True
            epochs += 1

        self.alpha_y = alpha * ys
        self.b = b
        sv = alpha > eps
        self._sv_idx = np.flatnonzero(sv)
        self._fit_platt(self.decision(x), ys)
        return self

    def decision(self, x):
        if len(self._sv_idx) == 0:
            return np.full(len(x), self.b)
        k = self._kernel(x, self.x_train[self._sv_idx])
        return k @ self.alpha_y[self._sv_idx] + self.b

    def _fit_platt(self, f, ys):
        """Sigmoid P(+|f) = 1/(1+exp(A f + B)) with Platt's smoothed targets,
        fitted by Newton iterations."""
        n_pos = int((ys > 0).sum())
        n_neg = len(ys) - n_pos
        t = np.where(ys > 0, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))
        a, b = 0.0, float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
        for _ in range(100):
            z = a * f + b
            p = 1.0 / (1.0 + np.exp(np.clip(z, -500, 500)))
            g = p - t  # note: dp/dz = -p(1-p) with this sign convention
            grad_a = float(-(g * f).sum())
            grad_b = float(-g.sum())
            w = p * (1.0 - p)
            h_aa = float((w * f * f).sum()) + 1e-12
            h_ab = float((w * f).sum())
            h_bb = float(w.sum()) + 1e-12
            det = h_aa * h_bb - h_ab ** 2
            if abs(det) < 1e-18:
                break
            da = (h_bb * grad_a - h_ab * grad_b) / det
            db = (h_aa * grad_b - h_ab * grad_a) / det
            a -= da
            b -= db
            if abs(da) + abs(db) < 1e-10:
                break
        self._platt = (a, b)

    def predict_scores(self, x):
        a, b = self._platt
        return 1.0 / (1.0 + np.exp(np.clip(a * self.decision(x) + b, -500, 500)))


# --- CART decision tree -----------------------------------------------------------


@dataclass
class _TreeNode:
    prob: float
    feature: int = -1
    threshold: float = 0.0
    left: "_TreeNode | None" = None
    right: "_TreeNode | None" = None
    gain: float = 0.0


class DecisionTreeImpl:
    """CART with Gini impurity, weighted samples; splits at midpoints of
    consecutive distinct values.  Deterministic tie-break: first feature in
    candidate order, smallest threshold."""

    def __init__(self, max_depth: int = 8, min_samples_leaf: int = 1,
                 max_features: int | None = None, seed: int = 0):
        if max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {max_depth}")
        if min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.seed = seed

    def fit(self, x, y, sample_weight=None):
        _check_xy(x, y)
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, float)
        self.n_features = x.shape[1]
        self.importances_ = np.zeros(self.n_features)
        rng = np.random.default_rng(self.seed)
        self.root = self._build(x, y.astype(float), w, 0, rng)
        total = self.importances_.sum()
        if total > 0:
            self.importances_ /= total
        return self

    def _best_split(self, x, y, w, features):
        best = None  # (weighted child impurity, feature, threshold, mask_left)
        for f in features:
            order = np.argsort(x[:, f], kind="stable")
            xs, ys, ws = x[order, f], y[order], w[order]
            cw = np.cumsum(ws)
            cwp = np.cumsum(ws * ys)
            total_w, total_p = cw[-1], cwp[-1]
            n = len(xs)
            idx = np.flatnonzero(xs[1:] > xs[:-1])  # split between i and i+1
            for i in idx:
                n_left = i + 1
                if n_left < self.min_samples_leaf or n - n_left < self.min_samples_leaf:
                    continue
                wl, pl = cw[i], cwp[i]
                wr, pr = total_w - wl, total_p - pl
                if wl <= 0 or wr <= 0:
                    continue
                gini_l = 1.0 - (pl / wl) ** 2 - (1.0 - pl / wl) ** 2
                gini_r = 1.0 - (pr / wr) ** 2 - (1.0 - pr / wr) ** 2
                score = wl * gini_l + wr * gini_r
                thr = (xs[i] + xs[i + 1]) / 2.0
                if best is None or score < best[0] - 1e-12:
                    best = (score, f, thr)
        return best

    def _build(self, x, y, w, depth, rng):
        wsum = w.sum()
        prob = float((w * y).sum() / wsum) if wsum > 0 else 0.5
        node = _TreeNode(prob=prob)
        if depth >= self.max_depth or len(y) < 2 * self.min_samples_leaf \
                or prob in (0.0, 1.0):
            return node
        if self.max_features is not None and self.max_features < self.n_features:
            features = np.sort(rng.choice(self.n_features, self.max_features, replace=False))
        else:
            features = np.arange(self.n_features)
        split = self._best_split(x, y, w, features)
        if split is None:
            return node
        score, f, thr = split
        parent_gini = wsum * (1.0 - prob ** 2 - (1.0 - prob) ** 2)
        node.gain = parent_gini - score
        self.importances_[f] += max(node.gain, 0.0)
        go_left = x[:, f] <= thr
        node.feature, node.threshold = int(f), float(thr)
        node.left = self._build(x[go_left], y[go_left], w[go_left], depth + 1, rng)
        node.right = self._build(x[~go_left], y[~go_left], w[~go_left], depth + 1, rng)
        return node

    def predict_scores(self, x):
        out = np.empty(len(x))
        for i, row in enumerate(x):
            node = self.root
            while node.left is not None:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.prob
        return out


class RandomForestImpl:
    """Bootstrap aggregation of CART trees with sqrt(d) feature subsampling
    per split; scores are the mean of per-tree leaf probabilities."""

    def __init__(self, n_estimators: int = 50, max_depth: int = 8,
                 min_samples_leaf: int = 1, seed: int = 0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.seed = seed

    def fit(self, x, y, sample_weight=None):
        _check_xy(x, y)
        rng = np.random.default_rng(self.seed)
        d = x.shape[1]
        k = max(1, int(np.sqrt(d)))
        self.trees = []
        for t in range(self.n_estimators):
            idx = rng.integers(0, len(y), len(y))
            tree = DecisionTreeImpl(self.max_depth, self.min_samples_leaf,
                                    max_features=k, seed=int(rng.integers(0, 2 ** 31)))
            xb, yb = x[idx], y[idx]
            if len(np.unique(yb)) < 2:  # resample once on a degenerate bootstrap
                idx = rng.integers(0, len(y), len(y))
                xb, yb = x[idx], y[idx]
                if len(np.unique(yb)) < 2:
                    continue
            self.trees.append(tree.fit(xb, yb))
        if not self.trees:
            raise SingleClassError("all bootstrap samples degenerate")
        self.importances_ = np.mean([t.importances_ for t in self.trees], axis=0)
        return self

    def predict_scores(self, x):
        return np.mean([t.predict_scores(x) for t in self.trees], axis=0)


class AdaBoostImpl:
    """SAMME over depth-1 stumps; score = alpha-weighted fraction of stumps
    voting positive."""

    def __init__(self, n_rounds: int = 50):
        self.n_rounds = n_rounds

    def fit(self, x, y, sample_weight=None):
        _check_xy(x, y)
        n = len(y)
        w = np.full(n, 1.0 / n)
        self.stumps: list[DecisionTreeImpl] = []
        self.alphas: list[float] = []
        for _ in range(self.n_rounds):
            stump = DecisionTreeImpl(max_depth=1).fit(x, y, sample_weight=w)
            pred = (stump.predict_scores(x) >= 0.5).astype(float)
            err = float(w[pred != y].sum())
            if err >= 0.5:
                break
            if err <= 1e-12:
                self.stumps.append(stump)
                self.alphas.append(12.0)  # effectively a perfect stump
                break
            a = float(np.log((1.0 - err) / err))
            self.stumps.append(stump)
            self.alphas.append(a)
            w = w * np.exp(a * (pred != y))
            w /= w.sum()
        if not self.stumps:
            # degenerate boosting: fall back to a single stump vote
            self.stumps = [DecisionTreeImpl(max_depth=1).fit(x, y)]
            self.alphas = [1.0]
        return self

    def predict_scores(self, x):
        total = sum(self.alphas)
        votes = np.zeros(len(x))
        for stump, a in zip(self.stumps, self.alphas):
            votes += a * (stump.predict_scores(x) >= 0.5)
        return votes / total


# --- TrainedModel wrapper ---------------------------------------------------------


def _make_impl(kind: str, hp: dict):
    hp = dict(hp)
    seed = hp.pop("seed", 0)
    if kind == "logistic-regression":
        return LogisticRegressionImpl(c=hp.get("c", 1.0))
    if kind == "svm":
        return SvmImpl(c=hp.get("c", 1.0), kernel=hp.get("kernel", "rbf"),
                       gamma=hp.get("gamma", "scale"))
    if kind == "decision-tree":
        return DecisionTreeImpl(max_depth=hp.get("max_depth", 8),
                                min_samples_leaf=hp.get("min_samples_leaf", 1))
    if kind == "random-forest":
        return RandomForestImpl(n_estimators=hp.get("n_estimators", 50),
                                max_depth=hp.get("max_depth", 8),
                                min_samples_leaf=hp.get("min_samples_leaf", 1),
                                seed=seed)
    if kind == "adaboost":
        return AdaBoostImpl(n_rounds=hp.get("n_rounds", 50))
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


@dataclass
class TrainedModel:
    kind: str
    hyperparameters: dict
    feature_names: list[str]
    classes: list  # sorted label values; classes[1] is positive
    impl: object
    chain: list = field(default_factory=list)  # fitted preprocessing steps
    cv_table: list = field(default_factory=list)

    def matrix_for(self, table: FeatureTable) -> np.ndarray:
        missing = [c for c in self.feature_names if c not in table.columns]
        if missing:
            raise TableError(f"missing feature columns: {missing}")
        return table.select_columns(self.feature_names).values

    def predict_scores(self, data) -> np.ndarray:
        x = self.matrix_for(data) if isinstance(data, FeatureTable) else np.asarray(data)
        return np.clip(self.impl.predict_scores(x), 0.0, 1.0)

    def apply_chain(self, table: FeatureTable) -> FeatureTable:
        """Replay the frozen preprocessing chain (never refits)."""
        for step in self.chain:
            table = step.apply(table)
        return table


def train_classifier(table: FeatureTable, kind: str, hyperparameters: dict | None = None,
                     rows: np.ndarray | None = None) -> TrainedModel:
    hp = dict(hyperparameters or {})
    fit_rows = table.fit_indices() if rows is None else rows
    sub = table.select_rows(fit_rows)
    y, classes = sub.binary_labels()
    impl = _make_impl(kind, hp).fit(sub.values, y)
    return TrainedModel(kind=kind, hyperparameters=hp,
                        feature_names=list(table.columns), classes=classes, impl=impl)


DEFAULT_GRIDS: dict[str, list[dict]] = {
    "logistic-regression": [{"c": c} for c in (0.1, 1.0, 10.0)],
    "svm": [{"kernel": "rbf", "c": c, "gamma": g}
            for c in (0.1, 1.0, 10.0) for g in ("scale", 0.01, 0.1)],
    "decision-tree": [{"max_depth": d, "min_samples_leaf": l}
                      for d in (2, 4, 8) for l in (1, 5)],
    "random-forest": [{"n_estimators": n, "max_depth": 8} for n in (25, 50)],
    "adaboost": [{"n_rounds": n} for n in (25, 50)],
}


def stratified_folds(y: np.ndarray, folds: int, seed: int = 0) -> list[np.ndarray]:
    """Deterministic stratified k-fold assignment over row indices."""
    rng = np.random.default_rng(seed)
    assignment = np.zeros(len(y), dtype=int)
    for cls in np.unique(y):
        members = np.flatnonzero(y == cls)
        members = members[rng.permutation(len(members))]
        assignment[members] = np.arange(len(members)) % folds
    return [np.flatnonzero(assignment == f) for f in range(folds)]


def grid_search_cv(table: FeatureTable, kind: str, grid: list[dict] | None = None,
                   folds: int = 5, seed: int = 0) -> TrainedModel:
    """Stratified k-fold grid search maximizing mean validation AUC; ties go
    to the first grid cell; the winner refits on all train rows."""
    from .metrics import auc_score  # late import to avoid a cycle

    grid = list(grid) if grid else list(DEFAULT_GRIDS[kind])
    train_idx = table.fit_indices()
    sub = table.select_rows(train_idx)
    y, classes = sub.binary_labels()
    fold_members = stratified_folds(y, folds, seed)

    cv_table = []
    means = []
    for cell_no, hp in enumerate(grid):
        aucs = []
        failed = None
        for f, val_members in enumerate(fold_members):
            tr = np.setdiff1d(np.arange(len(y)), val_members)
            if failed is None:
                try:
                    impl = _make_impl(kind, hp).fit(sub.values[tr], y[tr])
                    scores = impl.predict_scores(sub.values[val_members])
                    a = auc_score(y[val_members], scores) if len(np.unique(y[val_members])) == 2 else None
                except (ValueError, SingleClassError) as exc:
                    failed = str(exc)
                    a = None
            else:
                a = None
            aucs.append(a)
            cv_table.append({"cell": cell_no, "params": dict(hp), "fold": f, "auc": a})
        if failed is not None:
            _warnings.warn(f"grid cell {hp} skipped: {failed}")
            means.append(-np.inf)
        else:
            valid = [a for a in aucs if a is not None]
            means.append(float(np.mean(valid)) if valid else -np.inf)

    best = int(np.argmax(means))  # argmax takes the first maximum -> grid order ties
    if means[best] == -np.inf:
        raise ValueError("every grid cell failed")
    model = train_classifier(table, kind, grid[best])
    model.cv_table = cv_table
    model.hyperparameters = dict(grid[best])
    return model


# --- ensembling -------------------------------------------------------------------


@dataclass
class EnsembleModel:
    members: list[TrainedModel]
    mode: str  # voting | averaging

    def __post_init__(self):
        if self.mode not in ("voting", "averaging"):
            raise ValueError(f"ensemble mode must be voting|averaging, got {self.mode!r}")
        if not self.members:
            raise ValueError("ensemble needs at least one member")

    @property
    def classes(self):
        return self.members[0].classes

    @property
    def chain(self):
        return self.members[0].chain

    def apply_chain(self, table):
        return self.members[0].apply_chain(table)

    def predict_scores(self, data) -> np.ndarray:
        scores = np.stack([m.predict_scores(data) for m in self.members])
        if self.mode == "averaging":
            return scores.mean(axis=0)
        return (scores >= 0.5).mean(axis=0)


def ensemble_predict(models: list[TrainedModel], data, mode: str) -> np.ndarray:
    return EnsembleModel(list(models), mode).predict_scores(data)
