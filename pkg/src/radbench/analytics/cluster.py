"""K-means and the agglomerative ordering behind the heatmap view."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def kmeans(x: np.ndarray, k: int, seed: int = 0, max_iter: int = 300):
    """k-means++ init then Lloyd iterations until the assignment fixpoint.

    Returns (assignments, inertia, centers, inertia_history);
    deterministic per seed."""
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if not (1 <= k <= n):
        raise ValueError(f"k={k} out of range (1..{n})")
    rng = np.random.default_rng(seed)

    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[j] = x[rng.integers(n)]
        else:
            centers[j] = x[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((x - centers[j]) ** 2).sum(axis=1))

    assign = np.full(n, -1)
    history: list[float] = []
    for _ in range(max_iter):
        dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assign = dist.argmin(axis=1)  # ties -> lowest cluster index
        history.append(float(dist[np.arange(n), new_assign].sum()))
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            members = x[assign == j]
            if len(members):
                centers[j] = members.mean(axis=0)
            else:  # re-seat an empty cluster on the farthest point
                far = int(dist.min(axis=1).argmax())
                centers[j] = x[far]
    dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    inertia = float(dist[np.arange(n), assign].sum())
    return assign, inertia, centers, history


@dataclass
class Dendrogram:
    merges: list[tuple[int, int, float, int]]  # (id_a, id_b, height, new size)
    leaf_order: list[int]


def _average_linkage(x: np.ndarray) -> Dendrogram:
    """Classic O(n^3) average-linkage agglomeration with Lance-Williams
    distance updates; ties broken by smallest cluster ids."""
    n = len(x)
    if n == 1:
        return Dendrogram([], [0])
    d = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(d, np.inf)
    active = {i: (i, 1) for i in range(n)}  # row index -> (cluster id, size)
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    sizes = {i: 1 for i in range(n)}
    merges = []
    next_id = n
    dist = d.copy()
    alive = list(range(n))
    while len(alive) > 1:
        best = None
        for ai in range(len(alive)):
            for bi in range(ai + 1, len(alive)):
                a, b = alive[ai], alive[bi]
                val = dist[a, b]
                if best is None or val < best[0] - 1e-15:
                    best = (val, a, b)
        _, a, b = best
        ida, sa = active[a]
        idb, sb = active[b]
        height = float(dist[a, b])
        merges.append((ida, idb, height, sa + sb))
        # Lance-Williams: average linkage
        for c in alive:
            if c in (a, b):
                continue
            dist[a, c] = dist[c, a] = (sa * dist[a, c] + sb * dist[b, c]) / (sa + sb)
        active[a] = (next_id, sa + sb)
        members[next_id] = members[ida] + members[idb]
        sizes[next_id] = sa + sb
        alive.remove(b)
        next_id += 1

    # leaf order: recursive traversal, children ordered by (size, min leaf id)
    def order(cid: int) -> list[int]:
        if cid < n:
            return [cid]
        ida, idb, _, _ = merges[cid - n]
        ka = (sizes[ida], min(members[ida]))
        kb = (sizes[idb], min(members[idb]))
        first, second = (ida, idb) if ka <= kb else (idb, ida)
        return order(first) + order(second)

    return Dendrogram(merges, order(next_id - 1))


def heatmap_order(values: np.ndarray) -> tuple[Dendrogram, Dendrogram]:
    """Row and column dendrograms of the z-scored matrix (per-column
    standardization; constant columns become 0)."""
    x = np.asarray(values, dtype=np.float64)
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    z = np.divide(x - mu, sd, out=np.zeros_like(x), where=sd != 0)
    return _average_linkage(z), _average_linkage(z.T)
