"""Texture matrix builders: GLCM, GLRLM, GLSZM, GLDM, NGTDM.

All builders take a level array (int, 1..Ng inside the mask, 0 outside) plus
the mask and return raw count matrices; feature formulas live in texture.py.
Neighborhoods are Chebyshev distance 1 everywhere (26-connected, 13 unique
direction pairs).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

# 13 unique 3-D unit offsets (one representative per +/- pair)
DIRECTIONS_13: list[tuple[int, int, int]] = [
    (0, 0, 1), (0, 1, 0), (1, 0, 0),
    (0, 1, 1), (0, 1, -1), (1, 0, 1), (1, 0, -1), (1, 1, 0), (1, -1, 0),
    (1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1),
]

OFFSETS_26: list[tuple[int, int, int]] = [d for d in DIRECTIONS_13] + [
    tuple(-c for c in d) for d in DIRECTIONS_13  # type: ignore[misc]
]

_STRUCT_26 = np.ones((3, 3, 3), dtype=bool)


def _shift_slices(shape, offset):
    """Slicing pair (src, dst) so arr[src] aligns voxel p with arr[dst] at p+offset."""
    src, dst = [], []
    for n, step in zip(shape, offset):
        if step >= 0:
            src.append(slice(0, n - step))
            dst.append(slice(step, n))
        else:
            src.append(slice(-step, n))
            dst.append(slice(0, n + step))
    return tuple(src), tuple(dst)


def glcm_matrices(levels: np.ndarray, mask: np.ndarray, ng: int):
    """Per-direction symmetrized co-occurrence counts.

    Returns (counts, pair_totals): counts[d] is the (ng, ng) integer matrix
    of ordered pairs at offset d plus its transpose; pair_totals[d] its sum.
    """
    counts, totals = [], []
    for d in DIRECTIONS_13:
        src, dst = _shift_slices(levels.shape, d)
        valid = mask[src] & mask[dst]
        i = levels[src][valid]
        j = levels[dst][valid]
        c = np.bincount((i - 1) * ng + (j - 1), minlength=ng * ng).reshape(ng, ng)
        c = c + c.T
        counts.append(c)
        totals.append(int(c.sum()))
    return counts, totals


def glrlm_matrices(levels: np.ndarray, mask: np.ndarray, ng: int):
    """Per-direction run-length counts R[i, l-1]; out-of-mask voxels break runs."""
    coords = np.argwhere(mask)
    lv = levels[mask]
    # argwhere and boolean indexing both enumerate in C order, so lv[k]
    # is the level at coords[k]
    max_run = max(levels.shape)
    shape = np.array(levels.shape, dtype=np.int64)
    out = []
    for d in DIRECTIONS_13:
        dv = np.array(d, dtype=np.int64)
        axis = next(a for a in range(3) if d[a] != 0)
        t = coords[:, axis] * d[axis]
        # encode the line id (coords - t*d, components in [-n, 2n]) and t into
        # one scalar so that consecutive voxels of a line differ by exactly 1
        key = np.zeros(len(coords), dtype=np.int64)
        for a in range(3):
            key = key * (3 * shape[a]) + (coords[:, a] - t * dv[a] + shape[a])
        key = key * (2 * shape[axis]) + (t + shape[axis])
        order = np.argsort(key, kind="stable")
        ks = key[order]
        kl = lv[order]
        if len(kl) == 0:
            out.append(np.zeros((ng, max_run), dtype=np.int64))
            continue
        same_run = (ks[1:] == ks[:-1] + 1) & (kl[1:] == kl[:-1])
        starts = np.flatnonzero(np.concatenate([[True], ~same_run]))
        lengths = np.diff(np.concatenate([starts, [len(kl)]]))
        matrix = np.zeros((ng, max_run), dtype=np.int64)
        np.add.at(matrix, (kl[starts] - 1, lengths - 1), 1)
        out.append(matrix)
    return out


def glszm_matrix(levels: np.ndarray, mask: np.ndarray, ng: int) -> np.ndarray:
    """Zone counts Z[i, s-1]; zones are 26-connected equal-level components.

    One connected-components pass over the equal-level adjacency graph
    (edges from the 13 direction offsets); the matrix is trimmed to the
    largest zone size present.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    n = levels.size
    idx = np.arange(n, dtype=np.int64).reshape(levels.shape)
    rows, cols = [], []
    for d in DIRECTIONS_13:
        src, dst = _shift_slices(levels.shape, d)
        ok = mask[src] & mask[dst] & (levels[src] == levels[dst])
        rows.append(idx[src][ok])
        cols.append(idx[dst][ok])
    row = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    col = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(row), dtype=np.int8), (row, col)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    in_mask = mask.ravel()
    comp = labels[in_mask]
    lv = levels.ravel()[in_mask]
    # zone size per component; components never span levels or leave the mask
    sizes_by_comp = np.bincount(comp)
    uniq, first = np.unique(comp, return_index=True)
    zone_sizes = sizes_by_comp[uniq]
    zone_levels = lv[first]
    matrix = np.zeros((ng, max(int(zone_sizes.max()), 1)), dtype=np.int64)
    np.add.at(matrix, (zone_levels - 1, zone_sizes - 1), 1)
    return matrix


def gldm_matrix(levels: np.ndarray, mask: np.ndarray, ng: int, alpha: int = 0) -> np.ndarray:
    """Dependence counts D[i, k]: k in-mask 26-neighbors with |level diff| <= alpha."""
    dep = np.zeros(levels.shape, dtype=np.int32)
    for d in OFFSETS_26:
        src, dst = _shift_slices(levels.shape, d)
        ok = mask[src] & mask[dst] & (np.abs(levels[src] - levels[dst]) <= alpha)
        dep[src] += ok
    i = levels[mask] - 1
    k = dep[mask]
    matrix = np.bincount(i * 27 + k, minlength=ng * 27).reshape(ng, 27)
    return matrix.astype(np.int64)


@dataclass(frozen=True)
class NgtdmTable:
    n: np.ndarray  # voxels of each level with >= 1 in-mask neighbor
    p: np.ndarray  # n / n.sum()
    s: np.ndarray  # sum over those voxels of |level - mean neighbor level|
    n_valid: int


def ngtdm_table(levels: np.ndarray, mask: np.ndarray, ng: int) -> NgtdmTable:
    # levels are 0 outside the mask, so plain slice accumulation only ever
    # adds in-mask neighbors
    nb_sum = np.zeros(levels.shape, dtype=np.int64)
    nb_cnt = np.zeros(levels.shape, dtype=np.int32)
    for d in OFFSETS_26:
        src, dst = _shift_slices(levels.shape, d)
        nb_sum[src] += levels[dst]
        nb_cnt[src] += mask[dst]
    valid = mask & (nb_cnt > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean_nb = np.where(valid, nb_sum / np.maximum(nb_cnt, 1), 0.0)
    diff = np.abs(levels - mean_nb)
    lv = levels[valid] - 1
    n = np.bincount(lv, minlength=ng).astype(np.int64)
    s = np.bincount(lv, weights=diff[valid], minlength=ng)
    n_valid = int(n.sum())
    p = n / n_valid if n_valid > 0 else n.astype(np.float64)
    return NgtdmTable(n=n, p=p, s=s, n_valid=n_valid)
