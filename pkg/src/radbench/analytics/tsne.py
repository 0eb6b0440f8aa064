"""Exact O(n^2) t-SNE for small tables.

PCA initialization (deterministic sign convention) so duplicated input rows
start and stay at identical positions; early exaggeration x12 for the first
250 iterations; momentum gradient descent.  The final 100 iterations run in
a monotone mode (step halving on any KL increase) so the reported objective
is non-increasing at the end of the run.
"""

from __future__ import annotations

import numpy as np

EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
MONOTONE_TAIL = 100


def _auto_learning_rate(n: int) -> float:
    return max(n / EXAGGERATION / 4.0, 50.0)


def _pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    s = (x * x).sum(axis=1)
    d2 = s[:, None] + s[None, :] - 2.0 * x @ x.T
    np.fill_diagonal(d2, 0.0)
    return np.maximum(d2, 0.0)


def _conditional_p(d2_row: np.ndarray, i: int, perplexity: float) -> np.ndarray:
    """Binary-search the precision beta so the row entropy matches
    log2(perplexity)."""
    target = np.log2(perplexity)
    beta_lo, beta_hi = 0.0, np.inf
    beta = 1.0
    row = np.delete(d2_row, i)
    for _ in range(64):
        w = np.exp(-row * beta)
        total = w.sum()
        if total <= 0:
            h = 0.0
            p = np.zeros_like(row)
        else:
            p = w / total
            nz = p > 0
            h = float(-(p[nz] * np.log2(p[nz])).sum())
        if abs(h - target) < 1e-7:
            break
        if h > target:
            beta_lo = beta
            beta = beta * 2.0 if beta_hi == np.inf else (beta + beta_hi) / 2.0
        else:
            beta_hi = beta
            beta = beta / 2.0 if beta_lo == 0.0 else (beta + beta_lo) / 2.0
    out = np.insert(p, i, 0.0)
    return out


def _joint_p(x: np.ndarray, perplexity: float) -> np.ndarray:
    n = len(x)
    d2 = _pairwise_sq_dists(x)
    cond = np.stack([_conditional_p(d2[i], i, perplexity) for i in range(n)])
    p = (cond + cond.T) / (2.0 * n)
    return np.maximum(p, 1e-12)


def _q_matrix(y: np.ndarray):
    num = 1.0 / (1.0 + _pairwise_sq_dists(y))
    np.fill_diagonal(num, 0.0)
    q = num / num.sum()
    return np.maximum(q, 1e-12), num


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    return float((p * np.log(p / q)).sum())


def _pca_init(x: np.ndarray) -> np.ndarray:
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / len(x)
    vals, vecs = np.linalg.eigh(cov)
    components = vecs[:, np.argsort(vals)[::-1][:2]]
    for j in range(components.shape[1]):  # deterministic sign
        k = int(np.abs(components[:, j]).argmax())
        if components[k, j] < 0:
            components[:, j] = -components[:, j]
    y = centered @ components
    scale = y.std()
    if scale > 0:
        y = y / scale * 1e-4
    return np.ascontiguousarray(y[:, :2]) if y.shape[1] >= 2 else np.pad(y, ((0, 0), (0, 2 - y.shape[1])))


def tsne_embed(x: np.ndarray, perplexity: float = 30.0, iterations: int = 1000,
               seed: int = 0):
    """Embed rows of x into 2-D.  Returns (coords, kl_history).

    Duplicate input rows are embedded once and share one output position
    (identical affinities would keep them together in exact arithmetic;
    deduplication makes that hold bit-exactly).
    """
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if n > 5000:
        raise ValueError(f"exact t-SNE is limited to 5000 rows, got {n}")
    if n < 4:
        raise ValueError("t-SNE needs at least 4 rows")
    uniq, inverse = np.unique(x, axis=0, return_inverse=True)
    nu = len(uniq)
    if perplexity >= (nu - 1) / 3.0:
        raise ValueError(f"perplexity {perplexity} too large for {nu} distinct rows; "
                         f"needs < (n-1)/3 = {(nu - 1) / 3.0:.1f}")
    p_base = _joint_p(uniq, perplexity)
    y = _pca_init(uniq)
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    step = _auto_learning_rate(nu)
    kl_history = []
    for it in range(iterations):
        p = p_base * EXAGGERATION if it < EXAGGERATION_ITERS else p_base
        q, num = _q_matrix(y)
        grad_coeff = (p - q) * num
        grad = 4.0 * ((np.diag(grad_coeff.sum(axis=1)) - grad_coeff) @ y)
        momentum = 0.5 if it < 250 else 0.8
        if it >= iterations - MONOTONE_TAIL:
            # monotone tail: shrink the step until KL does not increase,
            # keeping the accepted step for the following iterations
            kl_now = _kl(p_base, q)
            for _ in range(40):
                y_try = y - step * grad
                if _kl(p_base, _q_matrix(y_try)[0]) <= kl_now:
                    y = y_try
                    break
                step /= 2.0
            velocity[:] = 0.0
        else:
            # adaptive per-coordinate gains (van der Maaten's heuristic)
            same_sign = np.sign(grad) == np.sign(velocity)
            gains = np.where(same_sign, gains * 0.8, gains + 0.2)
            gains = np.maximum(gains, 0.01)
            velocity = momentum * velocity - step * gains * grad
            y = y + velocity
            y = y - y.mean(axis=0)
        kl_history.append(_kl(p_base, _q_matrix(y)[0]))
    return y[inverse], kl_history
