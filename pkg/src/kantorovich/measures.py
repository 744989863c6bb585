"""Finite measures, cost spaces and the small validation toolkit shared by the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DimensionError, DomainError, InputError

TAU_MASS = 1e-9
TAU_MARG = 1e-9
TAU_METRIC = 1e-12

# Triangle inequality is checked exhaustively up to this many points, sampled above.
N_TRI = 400
_TRIANGLE_SAMPLES = 200_000


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FiniteDistribution:
    """Probability weights over the dense support ``0..n-1``."""

    weights: np.ndarray
    labels: Optional[Sequence] = None

    def __post_init__(self):
        w = _as_vector(self.weights, "weights")
        if w.size == 0:
            raise InputError("empty support")
        if np.any(w < 0):
            raise DomainError("negative weight in distribution")
        if abs(w.sum() - 1.0) > TAU_MASS:
            raise DomainError(f"weights sum to {w.sum()!r}, expected 1")
        if self.labels is not None and len(self.labels) != w.size:
            raise DimensionError("labels length does not match weights")
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size

    @classmethod
    def point_mass(cls, n: int, i: int) -> "FiniteDistribution":
        w = np.zeros(n)
        w[i] = 1.0
        return cls(w)


@dataclass(frozen=True)
class SignedMeasure:
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_vector(self.weights, "weights"))

    def __len__(self) -> int:
        return self.weights.size

    @property
    def charge(self) -> float:
        return float(self.weights.sum())

    @classmethod
    def difference(cls, mu: FiniteDistribution, nu: FiniteDistribution) -> "SignedMeasure":
        return cls(mu.weights - nu.weights)


@dataclass(frozen=True)
class CostSpace:
    """Square nonnegative cost matrix; ``is_metric`` records a passed metric check."""

    costs: np.ndarray
    is_metric: bool = False

    def __post_init__(self):
        c = np.array(self.costs, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DimensionError(f"cost matrix must be square, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InputError("cost matrix contains non-finite entries")
        if np.any(c < 0):
            raise DomainError("cost matrix has negative entries")
        c.setflags(write=False)
        object.__setattr__(self, "costs", c)

    @property
    def size(self) -> int:
        return self.costs.shape[0]

    @classmethod
    def metric(cls, costs) -> "CostSpace":
        """Build a cost space and certify it as a metric, raising on any violation."""
        report = validate_metric(costs)
        if not report.valid:
            raise DomainError(f"not a metric: {report.violations[:5]}")
        return cls(costs, is_metric=True)


@dataclass(frozen=True)
class TransportPlan:
    entries: np.ndarray
    source: FiniteDistribution
    target: FiniteDistribution

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.shape != (len(self.source), len(self.target)):
            raise DimensionError(
                f"plan shape {e.shape} does not match marginals "
                f"({len(self.source)}, {len(self.target)})"
            )
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def marginal_error(self) -> float:
        rows = np.abs(self.entries.sum(axis=1) - self.source.weights).max()
        cols = np.abs(self.entries.sum(axis=0) - self.target.weights).max()
        return float(max(rows, cols))

    def is_feasible(self, tol: float = TAU_MARG) -> bool:
        return bool(self.entries.min() >= -tol and self.marginal_error() <= tol)


@dataclass(frozen=True)
class DualPotential:
    """Potential values, meaningful up to an additive constant."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_vector(self.values, "potential"))

    def lipschitz_excess(self, costs: np.ndarray) -> float:
        """Largest ``u_i - u_j - c_ij``; nonpositive means 1-Lipschitz feasible."""
        u = self.values
        return float((u[:, None] - u[None, :] - np.asarray(costs)).max())


@dataclass(frozen=True)
class SampledTriple:
    """Empirical stand-in for a metric measure space.

    ``sampler(rng, n)`` returns ``n`` points; ``metric(x, y)`` must broadcast over
    numpy arrays.  Draws are a pure function of ``(seed, stream)`` and the draw index.
    """

    sampler: Callable[[np.random.Generator, int], np.ndarray]
    metric: Callable[[np.ndarray, np.ndarray], np.ndarray]
    description: str = ""
    is_metric: bool = True

    def draw(self, seed: int, n: int, stream: int = 0) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence([seed, stream]))
        return np.asarray(self.sampler(rng, n), dtype=float)


@dataclass
class MetricReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


def jordan_decompose(m: SignedMeasure | Sequence[float]):
    """Split a signed measure into positive and negative parts.

    Returns ``(pos, neg, mass)`` where ``mass`` is the total positive variation.
    """
    w = m.weights if isinstance(m, SignedMeasure) else _as_vector(m, "weights")
    pos = np.maximum(w, 0.0)
    neg = np.maximum(-w, 0.0)
    return pos, neg, float(pos.sum())


def validate_metric(c, tol: float = TAU_METRIC, seed: int = 0) -> MetricReport:
    costs = c.costs if isinstance(c, CostSpace) else np.asarray(c, dtype=float)
    if costs.ndim != 2 or costs.shape[0] != costs.shape[1]:
        raise DimensionError(f"cost matrix must be square, got shape {costs.shape}")
    n = costs.shape[0]
    report = MetricReport()
    for i in np.flatnonzero(np.abs(np.diag(costs)) > tol):
        report.violations.append(("diagonal", int(i), int(i)))
    for i, j in np.argwhere(np.abs(costs - costs.T) > tol):
        if i < j:
            report.violations.append(("symmetry", int(i), int(j)))
    for i, j in np.argwhere(costs < -tol):
        report.violations.append(("negative", int(i), int(j)))
    if n <= N_TRI:
        for k in range(n):
            bound = costs[:, k][:, None] + costs[k, :][None, :]
            for i, j in np.argwhere(costs > bound + tol):
                report.violations.append(("triangle", int(i), int(j), k))
    else:
        rng = np.random.default_rng(seed)
        i, j, k = rng.integers(0, n, size=(3, _TRIANGLE_SAMPLES))
        bad = costs[i, j] > costs[i, k] + costs[k, j] + tol
        for a, b, via in zip(i[bad], j[bad], k[bad]):
            report.violations.append(("triangle", int(a), int(b), int(via)))
    return report


def empirical_distribution(n: int) -> FiniteDistribution:
    if n < 1:
        raise InputError("empirical distribution needs at least one atom")
    return FiniteDistribution(np.full(n, 1.0 / n))
