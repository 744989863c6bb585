"""Iterated Kantorovich metrics along a finite sequence of coarsening partitions."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateClassError, DimensionError, InputError
from .measures import TAU_MASS, CostSpace, FiniteDistribution
from .transport import solve_mk

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelMetricSpace:
    """Quotient points at one level.

    ``leaf_class[i]`` is the class of leaf ``i`` (``-1`` for dropped null
    leaves); ``conditionals[a]`` is class ``a``'s conditional measure over the
    previous level's classes.
    """

    level: int
    masses: np.ndarray
    metric: np.ndarray
    leaf_class: np.ndarray
    conditionals: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return self.masses.size


@dataclass(frozen=True)
class PartitionTree:
    masses: np.ndarray
    base_cost: np.ndarray
    levels: tuple  # levels[k][leaf] = class id at level k+1

    def __post_init__(self):
        m = FiniteDistribution(self.masses).weights
        c = self.base_cost.costs if isinstance(self.base_cost, CostSpace) else np.asarray(self.base_cost, float)
        if c.shape != (m.size, m.size):
            raise DimensionError("base cost does not match the number of leaves")
        levels = tuple(np.asarray(lv, dtype=int) for lv in self.levels)
        prev = np.arange(m.size)
        for k, lv in enumerate(levels):
            if lv.shape != (m.size,):
                raise DimensionError(f"level {k + 1} does not label every leaf")
            # Leaves sharing a class at level k must share one at level k+1.
            for cls in np.unique(prev):
                if np.unique(lv[prev == cls]).size != 1:
                    raise InputError(f"level {k + 1} splits a class of level {k}")
            prev = lv
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "base_cost", c)
        object.__setattr__(self, "levels", levels)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def base_space(self) -> LevelMetricSpace:
        return LevelMetricSpace(0, self.masses.copy(), self.base_cost.copy(), np.arange(self.masses.size))


def quotient_step(space: LevelMetricSpace, next_partition) -> LevelMetricSpace:
    """Merge the classes of ``space`` into the classes of ``next_partition``.

    ``next_partition`` labels leaves; the new distance between two classes is
    the transport distance, in the current metric, between their conditional
    measures.
    """
    labels = np.asarray(next_partition, dtype=int)
    if labels.shape != space.leaf_class.shape:
        raise DimensionError("partition does not label every leaf")
    alive = space.leaf_class >= 0
    group_of = np.full(space.size, -1)
    for leaf in np.flatnonzero(alive):
        c, g = space.leaf_class[leaf], labels[leaf]
        if group_of[c] not in (-1, g):
            raise InputError("next partition splits a current class")
        group_of[c] = g

    ids, dense = np.unique(group_of, return_inverse=True)
    mass = np.bincount(dense, weights=space.masses, minlength=ids.size)
    keep = mass > 0
    if not keep.any():
        raise DegenerateClassError("all classes have zero mass")
    if not keep.all():
        log.warning("dropping %d zero-mass classes at level %d", int((~keep).sum()), space.level + 1)
    new_index = np.cumsum(keep) - 1
    k = int(keep.sum())
    cls = np.where(keep[dense], new_index[dense], -1)  # current class -> new class

    conditionals = np.zeros((k, space.size))
    for c in range(space.size):
        if cls[c] >= 0:
            conditionals[cls[c], c] = space.masses[c]
    new_mass = conditionals.sum(axis=1)
    conditionals /= new_mass[:, None]

    members = [np.flatnonzero(conditionals[a] > 0) for a in range(k)]
    metric = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            ia, ib = members[a], members[b]
            sub = space.metric[np.ix_(ia, ib)]
            metric[a, b] = metric[b, a] = solve_mk(sub, conditionals[a, ia], conditionals[b, ib]).value

    leaf_class = np.where(space.leaf_class >= 0, cls[np.maximum(space.leaf_class, 0)], -1)
    return LevelMetricSpace(space.level + 1, new_mass, metric, leaf_class, conditionals)


def tower_levels(tree: PartitionTree, k: Optional[int] = None) -> list[LevelMetricSpace]:
    k = tree.depth if k is None else k
    if not 0 <= k <= tree.depth:
        raise InputError(f"level {k} outside 0..{tree.depth}")
    spaces = [tree.base_space()]
    for lv in tree.levels[:k]:
        spaces.append(quotient_step(spaces[-1], lv))
    return spaces


def spread(space: LevelMetricSpace) -> float:
    """Mass-weighted mean pairwise distance; zero exactly on a metric point mass."""
    return float(space.masses @ space.metric @ space.masses)


def tower_statistic(tree: PartitionTree, k: int) -> float:
    return spread(tower_levels(tree, k)[-1])


def lift(space: LevelMetricSpace, lower_masses) -> np.ndarray:
    """Push a measure on the previous level's classes forward to this level's classes."""
    return space.conditionals.astype(bool).astype(float) @ np.asarray(lower_masses, float)


def barycenter_project(weights, conditionals) -> np.ndarray:
    """Mix the class conditionals by ``weights``: a measure on the previous level."""
    w = np.asarray(weights, dtype=float)
    if abs(w.sum() - 1) > TAU_MASS or np.any(w < 0):
        raise InputError("weights must be a probability vector")
    return w @ np.asarray(conditionals, dtype=float)


def dyadic_tree(bits: int, depth: Optional[int] = None) -> PartitionTree:
    """Uniform measure on ``{0,1}^bits`` with base metric ``|phi(x) - phi(y)|``,
    ``phi(x) = sum_i x_i 2^-(i+1)``.  Level ``k`` forgets the first ``k`` coordinates."""
    depth = bits if depth is None else depth
    if not 0 <= depth <= bits:
        raise InputError("depth must lie in 0..bits")
    n = 1 << bits
    digits = (np.arange(n)[:, None] >> np.arange(bits - 1, -1, -1)[None, :]) & 1
    phi = digits @ (0.5 ** np.arange(1, bits + 1))
    cost = np.abs(phi[:, None] - phi[None, :])
    levels = []
    for k in range(1, depth + 1):
        suffix = digits[:, k:] @ (1 << np.arange(bits - k - 1, -1, -1)) if k < bits else np.zeros(n, int)
        levels.append(suffix)
    return PartitionTree(np.full(n, 1.0 / n), cost, tuple(levels))
