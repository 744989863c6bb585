"""Exact square assignment and the empirical strong transport estimate built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError
from .transport import TAU_OBJ


@dataclass(frozen=True)
class Assignment:
    permutation: np.ndarray
    value: float

    def __post_init__(self):
        perm = np.asarray(self.permutation, dtype=int)
        if sorted(perm.tolist()) != list(range(perm.size)):
            raise InputError("permutation is not a bijection")
        object.__setattr__(self, "permutation", perm)

    def check(self, cost) -> bool:
        cost = np.asarray(cost, dtype=float)
        recomputed = cost[np.arange(cost.shape[0]), self.permutation].sum()
        return abs(recomputed - self.value) <= TAU_OBJ


def solve_assignment(cost) -> Assignment:
    """Minimum-cost perfect matching of rows to columns (Hungarian method, O(n^3)).

    Rows are inserted one at a time and matched along a shortest augmenting
    path in reduced costs; dual labels stay feasible throughout.
    """
    a = np.array(cost, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"assignment needs a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("cost matrix contains non-finite entries")
    n = a.shape[0]
    if n == 0:
        raise InputError("empty cost matrix")

    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    match = np.zeros(n + 1, dtype=int)  # match[j]: row (1-based) on column j; column 0 is virtual
    way = np.zeros(n + 1, dtype=int)
    padded = np.zeros((n + 1, n + 1))
    padded[1:, 1:] = a

    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            free = ~used
            free[0] = False
            cur = padded[i0] - u[i0] - v
            better = free & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            cand = np.where(free, minv, np.inf)
            j1 = int(np.argmin(cand))
            delta = cand[j1]
            u[match[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1

    perm = np.empty(n, dtype=int)
    perm[match[1:] - 1] = np.arange(n)
    value = math.fsum(a[np.arange(n), perm])
    return Assignment(perm, value)


def strong_mk_empirical(xs, ys, metric) -> float:
    """Empirical strong transport cost: best bijection between two equal-size samples, averaged."""
    xs, ys = np.asarray(xs), np.asarray(ys)
    if len(xs) != len(ys):
        raise InputError("samples must have equal size")
    if len(xs) == 0:
        raise InputError("empty sample")
    cost = np.asarray(metric(xs[:, None], ys[None, :]), dtype=float)
    return solve_assignment(cost).value / len(xs)
