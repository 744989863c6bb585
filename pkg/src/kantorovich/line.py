"""Transport on the unit interval: the CDF formula and the monotone rearrangement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError
from .measures import FiniteDistribution


@dataclass(frozen=True)
class LineDistribution:
    positions: np.ndarray
    weights: FiniteDistribution

    def __post_init__(self):
        x = np.asarray(self.positions, dtype=float)
        w = self.weights
        if not isinstance(w, FiniteDistribution):
            w = FiniteDistribution(w)
        if x.shape != w.weights.shape:
            raise InputError("positions and weights differ in length")
        if np.any(np.diff(x) <= 0):
            raise InputError("positions must be strictly increasing")
        if x.size and (x[0] < 0 or x[-1] > 1):
            raise DomainError("positions must lie in [0, 1]")
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_atoms(cls, positions, weights) -> "LineDistribution":
        """Accepts nondecreasing positions and merges atoms at equal positions."""
        x = np.asarray(positions, dtype=float)
        w = np.asarray(weights, dtype=float)
        if x.shape != w.shape or x.ndim != 1:
            raise InputError("positions and weights must be vectors of equal length")
        if np.any(np.diff(x) < 0):
            raise InputError("positions are not sorted")
        keep, idx = np.unique(x, return_inverse=True)
        merged = np.bincount(idx.ravel(), weights=w, minlength=keep.size)
        return cls(keep, FiniteDistribution(merged))

    @classmethod
    def point(cls, x: float) -> "LineDistribution":
        return cls(np.array([x]), FiniteDistribution([1.0]))

    def cdf(self, t) -> np.ndarray:
        cum = np.cumsum(self.weights.weights)
        k = np.searchsorted(self.positions, t, side="right")
        return np.where(k > 0, cum[np.maximum(k - 1, 0)], 0.0)


@dataclass(frozen=True)
class QuantileMap:
    sources: np.ndarray
    targets: np.ndarray
    masses: np.ndarray

    def pairs(self):
        return list(zip(self.sources.tolist(), self.targets.tolist(), self.masses.tolist()))


def k1_line(a: LineDistribution, b: LineDistribution) -> float:
    """Integral over [0, 1] of ``|F_a(t) - F_b(t)|`` on the merged breakpoint grid."""
    grid = np.union1d(a.positions, b.positions)
    gaps = np.diff(np.append(grid, 1.0))
    return float(np.sum(np.abs(a.cdf(grid) - b.cdf(grid)) * gaps))


def quantile_map(a: LineDistribution, b: LineDistribution) -> QuantileMap:
    """Monotone rearrangement of ``a`` onto ``b``, pairing mass quantile by quantile."""
    wa, wb = a.weights.weights, b.weights.weights
    src, dst, mass = [], [], []
    i = j = 0
    ra, rb = wa[0], wb[0]
    while i < len(wa) and j < len(wb):
        step = min(ra, rb)
        if step > 0:
            src.append(a.positions[i])
            dst.append(b.positions[j])
            mass.append(step)
        ra -= step
        rb -= step
        # The last atoms absorb rounding drift.
        if ra <= rb and i < len(wa) - 1:
            i += 1
            ra = wa[i]
        elif j < len(wb) - 1:
            j += 1
            rb = wb[j]
        else:
            break
    if ra > 0 and src:
        mass[-1] += ra
    return QuantileMap(np.array(src), np.array(dst), np.array(mass))
