"""Feature selection: variance threshold, select-k-best (chi2 / ANOVA-F /
mutual information), select-from-model, recursive feature elimination, and
stable selection across selectors.

Every selector scores on the fit rows (train split, or all rows when nothing
is assigned), keeps a subset of columns in their original order, and returns
a replayable FittedSelect step for the preprocessing chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import LassoLogisticImpl, RandomForestImpl, SvmImpl, lasso_logistic_path
from .table import FeatureTable, TableError

SCORE_KINDS = ("chi2", "anova-f", "mutual-info")


class SelectionError(ValueError):
    pass


@dataclass
class FittedSelect:
    """Replayable column subset (alignment by name)."""

    columns: list[str]

    def apply(self, table: FeatureTable) -> FeatureTable:
        return table.select_columns(self.columns)


@dataclass
class SelectionResult:
    table: FeatureTable
    step: FittedSelect
    scores: dict[str, float] = field(default_factory=dict)
    info: dict = field(default_factory=dict)


def _fit_xy(table: FeatureTable):
    sub = table.select_rows(table.fit_indices())
    y, classes = sub.binary_labels()
    return sub.values, y, classes


def _keep(table: FeatureTable, keep_mask: np.ndarray) -> list[str]:
    return [c for c, k in zip(table.columns, keep_mask) if k]


def variance_threshold(table: FeatureTable, threshold: float = 0.0) -> SelectionResult:
    """Drop columns whose train-row population variance is <= threshold."""
    x = table.values[table.fit_indices()]
    variances = x.var(axis=0)
    keep = variances > threshold
    if not keep.any():
        raise SelectionError(f"variance threshold {threshold} removed every column")
    cols = _keep(table, keep)
    step = FittedSelect(cols)
    scores = dict(zip(table.columns, variances.tolist()))
    return SelectionResult(step.apply(table), step, scores)


def _chi2_scores(x, y):
    if (x < 0).any():
        raise SelectionError(
            "chi2 requires non-negative feature values; apply min-max scaling first"
        )
    observed = np.stack([x[y == cls].sum(axis=0) for cls in (0.0, 1.0)])
    priors = np.array([(y == 0).mean(), (y == 1).mean()])
    expected = priors[:, None] * x.sum(axis=0)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = np.where(expected > 0, (observed - expected) ** 2 / expected, 0.0)
    return terms.sum(axis=0)


def _anova_f_scores(x, y):
    groups = [x[y == cls] for cls in (0.0, 1.0)]
    overall = x.mean(axis=0)
    n = len(x)
    ss_between = sum(len(g) * (g.mean(axis=0) - overall) ** 2 for g in groups)
    ss_within = sum(((g - g.mean(axis=0)) ** 2).sum(axis=0) for g in groups)
    df_between = len(groups) - 1
    df_within = n - len(groups)
    ms_between = ss_between / df_between
    ms_within = ss_within / max(df_within, 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.where(ms_within > 0, ms_between / ms_within,
                     np.where(ms_between > 0, np.inf, 0.0))
    return f


def _mutual_info_scores(x, y, bins: int = 8):
    """Histogram MI (log2) with per-feature quantile bins."""
    n, d = x.shape
    out = np.zeros(d)
    y_idx = (y > 0.5).astype(int)
    py = np.bincount(y_idx, minlength=2) / n
    for j in range(d):
        col = x[:, j]
        edges = np.unique(np.quantile(col, np.linspace(0, 1, bins + 1)[1:-1]))
        cell = np.searchsorted(edges, col, side="right")
        n_cells = len(edges) + 1
        joint = np.zeros((n_cells, 2))
        np.add.at(joint, (cell, y_idx), 1.0)
        joint /= n
        px = joint.sum(axis=1)
        mi = 0.0
        for a in range(n_cells):
            for b in range(2):
                if joint[a, b] > 0:
                    mi += joint[a, b] * np.log2(joint[a, b] / (px[a] * py[b]))
        out[j] = max(mi, 0.0)
    return out


def select_k_best(table: FeatureTable, k: int | None = None,
                  percentile: float | None = None,
                  score: str = "anova-f") -> SelectionResult:
    if score not in SCORE_KINDS:
        raise SelectionError(f"unknown score {score!r}; expected one of {SCORE_KINDS}")
    if (k is None) == (percentile is None):
        raise SelectionError("give exactly one of k or percentile")
    if percentile is not None:
        k = max(1, int(np.ceil(percentile / 100.0 * table.n_cols)))
    if not (1 <= k <= table.n_cols):
        raise SelectionError(f"k={k} out of range (1..{table.n_cols})")
    x, y, _ = _fit_xy(table)
    scorer = {"chi2": _chi2_scores, "anova-f": _anova_f_scores,
              "mutual-info": _mutual_info_scores}[score]
    s = np.nan_to_num(scorer(x, y), nan=0.0, posinf=np.finfo(float).max)
    ranked = np.argsort(-s, kind="stable")  # ties keep column order
    chosen = np.zeros(table.n_cols, dtype=bool)
    chosen[ranked[:k]] = True
    cols = _keep(table, chosen)
    step = FittedSelect(cols)
    return SelectionResult(step.apply(table), step, dict(zip(table.columns, s.tolist())))


def _model_weights(x, y, model: str, params: dict, seed: int = 0):
    """|weight| or importance per column, plus extra UI info."""
    info: dict = {}
    if model == "l1-logistic":
        lam = params.get("lam", 0.01)
        lambdas = np.geomspace(max(lam * 100, 1e-3), lam, 20)
        path = lasso_logistic_path(x, y, lambdas)
        info["lambda_path"] = lambdas.tolist()
        info["coefficient_path"] = [c.tolist() for c in path]
        weights = np.abs(path[-1])
    elif model == "linear-svm":
        svm = SvmImpl(c=params.get("c", 1.0), kernel="linear").fit(x, y)
        sv = svm._sv_idx
        w = svm.x_train[sv].T @ svm.alpha_y[sv] if len(sv) else np.zeros(x.shape[1])
        weights = np.abs(w)
    elif model == "tree-importance":
        forest = RandomForestImpl(n_estimators=params.get("n_estimators", 25),
                                  seed=seed).fit(x, y)
        weights = forest.importances_
    else:
        raise SelectionError(f"unknown selector model {model!r}")
    return weights, info


def select_from_model(table: FeatureTable, model: str = "l1-logistic",
                      threshold: float | None = None, k: int | None = None,
                      params: dict | None = None, seed: int = 0) -> SelectionResult:
    """Keep columns whose |weight| passes the threshold (default: the mean of
    |weights|), or the top-k by |weight| when k is given."""
    x, y, _ = _fit_xy(table)
    weights, info = _model_weights(x, y, model, params or {}, seed)
    if not np.any(weights != 0):
        raise SelectionError("selection is empty: every model weight is zero")
    if k is not None:
        if not (1 <= k <= table.n_cols):
            raise SelectionError(f"k={k} out of range")
        ranked = np.argsort(-weights, kind="stable")
        chosen = np.zeros(table.n_cols, dtype=bool)
        chosen[ranked[:k]] = True
    else:
        cut = threshold if threshold is not None else float(np.abs(weights).mean())
        chosen = np.abs(weights) >= cut
        if not chosen.any():
            raise SelectionError("selection is empty: every weight fell below the threshold")
    cols = _keep(table, chosen)
    step = FittedSelect(cols)
    return SelectionResult(step.apply(table), step,
                           dict(zip(table.columns, weights.tolist())), info)


def rfe(table: FeatureTable, estimator: str = "linear-svm", n_target: int = 1,
        step: int = 1, params: dict | None = None, seed: int = 0) -> SelectionResult:
    """Recursively drop the `step` lowest-|weight| columns until n_target
    remain; records the full elimination order (first eliminated first)."""
    if not (1 <= n_target <= table.n_cols):
        raise SelectionError(f"n_target={n_target} out of range")
    if step < 1:
        raise SelectionError("step must be >= 1")
    x, y, _ = _fit_xy(table)
    remaining = list(range(table.n_cols))
    eliminated: list[str] = []
    while len(remaining) > n_target:
        weights, _ = _model_weights(x[:, remaining], y, estimator, params or {}, seed)
        drop_n = min(step, len(remaining) - n_target)
        order = np.argsort(weights, kind="stable")[:drop_n]
        for j in sorted(order, reverse=True):
            eliminated.append(table.columns[remaining[j]])
            del remaining[j]
    cols = [table.columns[j] for j in remaining]
    fitted = FittedSelect(cols)
    return SelectionResult(fitted.apply(table), fitted, {},
                           {"elimination_order": eliminated})


def select_stable(table: FeatureTable, k: int, selectors: list[dict]) -> SelectionResult:
    """Run each selector spec; rank features by (selection count desc, mean
    rank asc, name asc) and keep the top k."""
    if not selectors:
        raise SelectionError("select_stable needs at least one selector")
    if not (1 <= k <= table.n_cols):
        raise SelectionError(f"k={k} out of range")
    counts = {c: 0 for c in table.columns}
    ranks = {c: [] for c in table.columns}
    for spec in selectors:
        spec = dict(spec)
        kind = spec.pop("selector")
        result = run_selector(table, kind, spec)
        kept = result.step.columns
        for col in kept:
            counts[col] += 1
            if result.scores:
                # rank by score so equal scores share a rank (ties then fall
                # through to the lexicographic rule)
                rank = sum(1 for o in kept if result.scores[o] > result.scores[col])
            else:
                rank = kept.index(col)
            ranks[col].append(rank)
        for col in table.columns:
            if col not in kept:
                ranks[col].append(table.n_cols)  # worst rank when not selected
    order = sorted(table.columns,
                   key=lambda c: (-counts[c], float(np.mean(ranks[c])), c))
    chosen = set(order[:k])
    cols = [c for c in table.columns if c in chosen]
    fitted = FittedSelect(cols)
    scores = {c: float(counts[c]) for c in table.columns}
    return SelectionResult(fitted.apply(table), fitted, scores)


def run_selector(table: FeatureTable, kind: str, params: dict) -> SelectionResult:
    """Dispatch a selector by name (used by select_stable and graph nodes)."""
    params = dict(params)
    if kind == "variance-threshold":
        return variance_threshold(table, params.get("threshold", 0.0))
    if kind == "select-k-best":
        return select_k_best(table, params.get("k"), params.get("percentile"),
                             params.get("score", "anova-f"))
    if kind == "select-from-model":
        return select_from_model(table, params.get("model", "l1-logistic"),
                                 params.get("threshold"), params.get("k"),
                                 params.get("params"), params.get("seed", 0))
    if kind == "rfe":
        return rfe(table, params.get("estimator", "linear-svm"),
                   params.get("n_target", 1), params.get("step", 1),
                   params.get("params"), params.get("seed", 0))
    raise SelectionError(f"unknown selector {kind!r}")
