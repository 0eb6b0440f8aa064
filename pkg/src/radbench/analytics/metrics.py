"""ROC/AUC/AP metrics with hypothesis tests.

AUC is the trapezoid area under the threshold-sweep ROC, which equals the
Mann-Whitney statistic with half credit for ties.  The AUC p-value is a
one-sample DeLong test against 0.5; the AP p-value a seeded label
permutation test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .table import FeatureTable, TableError

DELONG_SENTINEL_P = 1e-11  # reported when the DeLong variance degenerates


class MetricsError(ValueError):
    pass


def _check_binary(labels: np.ndarray):
    labels = np.asarray(labels, dtype=np.float64)
    if not np.all(np.isin(labels, (0.0, 1.0))):
        raise MetricsError("labels must be 0/1")
    if labels.min() == labels.max():
        raise MetricsError("AUC undefined: evaluation rows contain a single class")
    return labels


def roc_curve(labels, scores):
    """(fpr, tpr, thresholds) from a descending sweep over unique scores,
    starting at (0, 0) with threshold +inf."""
    labels = _check_binary(labels)
    scores = np.asarray(scores, dtype=np.float64)
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    distinct = np.flatnonzero(np.diff(s) != 0)
    idx = np.concatenate([distinct, [len(s) - 1]])
    tps = np.cumsum(y)[idx]
    fps = np.cumsum(1.0 - y)[idx]
    n_pos = labels.sum()
    n_neg = len(labels) - n_pos
    fpr = np.concatenate([[0.0], fps / n_neg])
    tpr = np.concatenate([[0.0], tps / n_pos])
    thresholds = np.concatenate([[np.inf], s[idx]])
    return fpr, tpr, thresholds


def auc_score(labels, scores) -> float:
    fpr, tpr, _ = roc_curve(labels, scores)
    return float(np.trapezoid(tpr, fpr))


def average_precision(labels, scores) -> float:
    """AP = sum over the threshold sweep of (R_n - R_{n-1}) * P_n."""
    labels = _check_binary(labels)
    scores = np.asarray(scores, dtype=np.float64)
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    distinct = np.flatnonzero(np.diff(s) != 0)
    idx = np.concatenate([distinct, [len(s) - 1]])
    tps = np.cumsum(y)[idx]
    fps = np.cumsum(1.0 - y)[idx]
    n_pos = labels.sum()
    precision = tps / (tps + fps)
    recall = tps / n_pos
    prev = np.concatenate([[0.0], recall[:-1]])
    return float(((recall - prev) * precision).sum())


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _midrank(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    z = x[order]
    n = len(x)
    t = np.zeros(n)
    i = 0
    while i < n:
        j = i
        while j < n and z[j] == z[i]:
            j += 1
        t[i:j] = 0.5 * (i + j - 1) + 1.0
        i = j
    out = np.empty(n)
    out[order] = t
    return out


def _delong_components(labels, scores):
    """Structural components (V10, V01) and the AUC."""
    labels = np.asarray(labels, dtype=np.float64)
    scores = np.asarray(scores, dtype=np.float64)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    m, n = len(pos), len(neg)
    if m == 0 or n == 0:
        raise MetricsError("DeLong needs both classes")
    all_ranks = _midrank(np.concatenate([pos, neg]))
    pos_ranks = _midrank(pos)
    neg_ranks = _midrank(neg)
    v10 = (all_ranks[:m] - pos_ranks) / n
    v01 = 1.0 - (all_ranks[m:] - neg_ranks) / m
    auc = float(v10.mean())
    return auc, v10, v01


def delong_test(labels, scores) -> tuple[float, float, bool]:
    """One-sample DeLong test of AUC against 0.5.

    Returns (auc, two-sided p, degenerate flag); zero variance with a
    non-trivial AUC reports the sentinel p with the flag set.
    """
    auc, v10, v01 = _delong_components(labels, scores)
    m, n = len(v10), len(v01)
    var = (v10.var(ddof=1) / m if m > 1 else 0.0) + (v01.var(ddof=1) / n if n > 1 else 0.0)
    if var <= 0:
        if auc == 0.5:
            return auc, 1.0, True
        return auc, DELONG_SENTINEL_P, True
    z = (auc - 0.5) / math.sqrt(var)
    return auc, 2.0 * _normal_sf(abs(z)), False


def delong_compare(labels, scores_a, scores_b) -> tuple[float, float, bool]:
    """Paired DeLong test for two score sets on the same rows.

    Returns (auc difference, two-sided p, degenerate flag)."""
    auc_a, v10_a, v01_a = _delong_components(labels, scores_a)
    auc_b, v10_b, v01_b = _delong_components(labels, scores_b)
    diff = auc_a - auc_b
    m, n = len(v10_a), len(v01_a)
    var = 0.0
    if m > 1:
        s10 = np.cov(np.stack([v10_a, v10_b]), ddof=1)
        var += (s10[0, 0] - 2.0 * s10[0, 1] + s10[1, 1]) / m
    if n > 1:
        s01 = np.cov(np.stack([v01_a, v01_b]), ddof=1)
        var += (s01[0, 0] - 2.0 * s01[0, 1] + s01[1, 1]) / n
    if var <= 0:
        if diff == 0.0:
            return diff, 1.0, True
        return diff, DELONG_SENTINEL_P, True
    z = diff / math.sqrt(var)
    return diff, 2.0 * _normal_sf(abs(z)), False


def permutation_test_ap(labels, scores, n_permutations: int = 1000, seed: int = 0) -> float:
    """P(AP_permuted >= AP_observed) with add-one smoothing."""
    labels = _check_binary(labels)
    observed = average_precision(labels, scores)
    rng = np.random.default_rng(seed)
    hits = 0
    work = labels.copy()
    for _ in range(n_permutations):
        rng.shuffle(work)
        if average_precision(work, scores) >= observed - 1e-12:
            hits += 1
    return (1 + hits) / (n_permutations + 1)


@dataclass
class Metrics:
    roc: list[tuple[float, float, float]]  # (fpr, tpr, threshold)
    auc: float
    ap: float
    auc_p_value: float
    ap_p_value: float
    confusion: dict[str, int]  # tp/fp/tn/fn at threshold 0.5
    accuracy: float
    sensitivity: float
    specificity: float
    warnings: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            # the sweep starts at threshold +inf, which JSON cannot carry
            "roc": [[float(a), float(b), None if math.isinf(c) else float(c)]
                    for a, b, c in self.roc],
            "auc": self.auc,
            "ap": self.ap,
            "auc_p_value": self.auc_p_value,
            "ap_p_value": self.ap_p_value,
            "confusion": dict(self.confusion),
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Metrics":
        return cls(
            roc=[(a, b, math.inf if c is None else c) for a, b, c in doc["roc"]],
            auc=doc["auc"], ap=doc["ap"],
            auc_p_value=doc["auc_p_value"], ap_p_value=doc["ap_p_value"],
            confusion=dict(doc["confusion"]), accuracy=doc["accuracy"],
            sensitivity=doc["sensitivity"], specificity=doc["specificity"],
            warnings=list(doc.get("warnings", [])),
        )


def compute_metrics(labels, scores, permutation_seed: int = 0) -> Metrics:
    labels = _check_binary(np.asarray(labels, dtype=np.float64))
    scores = np.asarray(scores, dtype=np.float64)
    fpr, tpr, thr = roc_curve(labels, scores)
    auc = float(np.trapezoid(tpr, fpr))
    ap = average_precision(labels, scores)
    _, auc_p, degenerate = delong_test(labels, scores)
    ap_p = permutation_test_ap(labels, scores, seed=permutation_seed)
    pred = scores >= 0.5
    tp = int((pred & (labels == 1)).sum())
    fp = int((pred & (labels == 0)).sum())
    tn = int((~pred & (labels == 0)).sum())
    fn = int((~pred & (labels == 1)).sum())
    warnings = ["delong-degenerate-variance"] if degenerate else []
    return Metrics(
        roc=list(zip(fpr.tolist(), tpr.tolist(), thr.tolist())),
        auc=auc,
        ap=ap,
        auc_p_value=auc_p,
        ap_p_value=ap_p,
        confusion={"tp": tp, "fp": fp, "tn": tn, "fn": fn},
        accuracy=(tp + tn) / len(labels),
        sensitivity=tp / (tp + fn),
        specificity=tn / (tn + fp),
        warnings=warnings,
    )


def evaluate(model, table: FeatureTable, split: str = "validation",
             permutation_seed: int = 0) -> Metrics:
    """Score the rows of one split with a trained model and compute Metrics."""
    idx = table.split_indices(split)
    if len(idx) == 0:
        raise MetricsError(f"no rows in split {split!r}")
    sub = table.select_rows(idx)
    y = np.asarray([l == model.classes[1] for l in sub.label_array()], dtype=np.float64)
    if y.min() == y.max():
        raise MetricsError(f"split {split!r} contains a single class")
    scores = model.predict_scores(sub)
    return compute_metrics(y, scores, permutation_seed)
