"""Random distance matrices of metric triples and the Monte Carlo k_n experiment.

A sample draws one i.i.d. sequence ``x_1..x_n`` and fills ``f(x_i, x_j)``
with ``f(x, y) = rho(x, S y)``.  The allocation value of the matrix,
normalized by ``n``, estimates the transport cost between ``mu`` and the
image of ``mu`` under ``S``.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.stats import ks_2samp

from .assignment import solve_assignment
from .errors import InputError, UnsupportedPairError
from .line import LineDistribution, k1_line
from .measures import SampledTriple

# Quantile grid used to evaluate the exact 1D reference value.
EXACT_GRID = 1 << 16


@dataclass(frozen=True)
class Law1D:
    """A law on a bounded interval given by its CDF and quantile function."""

    name: str
    cdf: Callable[[np.ndarray], np.ndarray]
    quantile: Callable[[np.ndarray], np.ndarray]
    atomic: bool = False

    def scaled(self, c: float) -> "Law1D":
        return Law1D(
            f"{c:g}*{self.name}",
            lambda x: self.cdf(np.asarray(x) / c),
            lambda u: c * self.quantile(u),
            self.atomic,
        )


def _uniform01() -> Law1D:
    return Law1D("uniform01", lambda x: np.clip(x, 0.0, 1.0), lambda u: np.asarray(u, dtype=float))


def _square() -> Law1D:
    # Image of uniform[0, 1] under t -> t^2.
    return Law1D(
        "square",
        lambda x: np.sqrt(np.clip(x, 0.0, 1.0)),
        lambda u: np.asarray(u, dtype=float) ** 2,
    )


def _twopoint(p: float) -> Law1D:
    if not 0.0 <= p <= 1.0:
        raise InputError(f"twopoint probability must lie in [0, 1], got {p}")
    return Law1D(
        f"twopoint({p:g})",
        lambda x: np.where(np.asarray(x) >= 1.0, 1.0, np.where(np.asarray(x) >= 0.0, 1.0 - p, 0.0)),
        lambda u: (np.asarray(u) > 1.0 - p).astype(float),
        atomic=True,
    )


def point_law(c: float = 0.0) -> Law1D:
    return Law1D(
        f"point({c:g})",
        lambda x: (np.asarray(x) >= c).astype(float),
        lambda u: np.full(np.shape(u), float(c)),
        atomic=True,
    )


def discrete_law(dist: LineDistribution) -> Law1D:
    cum = np.cumsum(dist.weights.weights)
    pos = dist.positions
    return Law1D(
        "discrete",
        dist.cdf,
        lambda u: pos[np.minimum(np.searchsorted(cum, u, side="left"), pos.size - 1)],
        atomic=True,
    )


def named_law(text: str) -> Law1D:
    """Parse ``uniform01``, ``square``, ``twopoint(p)`` or ``point(c)``."""
    text = text.strip()
    if text == "uniform01":
        return _uniform01()
    if text == "square":
        return _square()
    m = re.fullmatch(r"(twopoint|point)\(\s*([-+0-9.eE]+)\s*\)", text)
    if m:
        value = float(m.group(2))
        return _twopoint(value) if m.group(1) == "twopoint" else point_law(value)
    raise InputError(f"unknown law {text!r}")


@dataclass(frozen=True)
class LineTriple(SampledTriple):
    """Triple on an interval ``[0, scale]`` with metric ``|x - y| / scale``."""

    law: Optional[Law1D] = None
    scale: float = 1.0


def line_triple(law: Law1D | str, scale: float = 1.0) -> LineTriple:
    if isinstance(law, str):
        law = named_law(law)
    scaled = law if scale == 1.0 else law.scaled(scale)
    return LineTriple(
        sampler=lambda rng, n: scaled.quantile(rng.random(n)),
        metric=lambda x, y: np.abs(x - y) / scale,
        description=f"{scaled.name} with |x-y|/{scale:g}",
        is_metric=True,
        law=scaled,
        scale=scale,
    )


def realize_map(triple: SampledTriple, target) -> Callable[[np.ndarray], np.ndarray]:
    """Measure-preserving map S carrying ``triple``'s law onto ``target``.

    ``target`` may be ``None`` (identity), a callable used as S directly, a
    :class:`Law1D`, a law name, or a :class:`LineDistribution`.  For 1D laws S
    is the monotone rearrangement ``G^-1 o F``; it exists only for non-atomic
    source laws.
    """
    if target is None or (isinstance(target, str) and target == "identity"):
        return lambda x: x
    if callable(target) and not isinstance(target, Law1D):
        return target
    law = getattr(triple, "law", None)
    if law is None:
        raise UnsupportedPairError("no measure-preserving map for a triple without a 1D law")
    if isinstance(target, str):
        target = named_law(target)
        if isinstance(triple, LineTriple) and triple.scale != 1.0:
            target = target.scaled(triple.scale)
    elif isinstance(target, LineDistribution):
        target = discrete_law(target)
    if target.name == law.name:
        return lambda x: x
    if law.atomic:
        raise UnsupportedPairError(f"cannot realize {law.name} -> {target.name}: source has atoms")
    return lambda x: target.quantile(law.cdf(x))


@dataclass(frozen=True)
class MatrixSample:
    entries: np.ndarray
    seed: int
    n: int
    symmetric: bool
    points: np.ndarray
    shifted_points: np.ndarray


@dataclass
class ConvergenceReport:
    n_grid: list
    estimates: list  # one row of per-trial values for each n
    exact: Optional[float]
    trials: int
    seed: int
    trial_seeds: list = field(default_factory=list)

    def errors(self) -> np.ndarray:
        if self.exact is None:
            raise ValueError("no exact reference attached")
        return np.abs(np.asarray(self.estimates) - self.exact)

    def median_errors(self) -> np.ndarray:
        return np.median(self.errors(), axis=1)

    def exceed_fraction(self, threshold: float) -> np.ndarray:
        return np.mean(self.errors() > threshold, axis=1)

    def to_dict(self) -> dict:
        return {
            "n_grid": list(self.n_grid),
            "trials": self.trials,
            "estimates": [list(map(float, row)) for row in self.estimates],
            "exact": self.exact,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConvergenceReport":
        return cls(list(d["n_grid"]), [list(r) for r in d["estimates"]], d["exact"], d["trials"], d["seed"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "trial", "seed", "estimate"])
        for k, n in enumerate(self.n_grid):
            for t, value in enumerate(self.estimates[k]):
                seed = self.trial_seeds[k][t] if self.trial_seeds else ""
                w.writerow([n, t, seed, repr(float(value))])
        return buf.getvalue()


def derive_seed(master_seed: int, n: int, trial: int) -> int:
    """Trial seed: first 32-bit word of numpy's SeedSequence hash of ``(master, n, trial)``."""
    return int(np.random.SeedSequence([master_seed, n, trial]).generate_state(1)[0])


def sample_matrix(triple: SampledTriple, n: int, seed: int) -> MatrixSample:
    return shifted_matrix(triple, None, n, seed)


def shifted_matrix(triple: SampledTriple, target, n: int, seed: int) -> MatrixSample:
    if n < 1:
        raise InputError("matrix size must be at least 1")
    S = realize_map(triple, target)
    x = triple.draw(seed, n)
    sx = np.asarray(S(x), dtype=float)
    entries = np.asarray(triple.metric(x[:, None], sx[None, :]), dtype=float)
    identity = target is None or (isinstance(target, str) and target == "identity")
    return MatrixSample(entries, seed, n, bool(identity and triple.is_metric), x, sx)


def k_n_estimate(sample: MatrixSample) -> float:
    """Allocation value over bistochastic matrices, divided by ``n``."""
    return solve_assignment(sample.entries).value / sample.n


def exact_line_value(triple: LineTriple, target, grid: int = EXACT_GRID) -> float:
    """Reference transport cost between the triple's law and its image under S.

    Uses the CDF formula on a midpoint quantile discretization of both laws.
    """
    S = realize_map(triple, target)
    u = (np.arange(grid) + 0.5) / grid
    x = triple.law.quantile(u)
    sx = np.asarray(S(x), dtype=float)
    c = triple.scale
    a = LineDistribution.from_atoms(np.sort(x) / c, np.full(grid, 1.0 / grid))
    b = LineDistribution.from_atoms(np.sort(sx) / c, np.full(grid, 1.0 / grid))
    return k1_line(a, b)


def run_convergence(
    triple: SampledTriple,
    target,
    n_grid,
    trials: int,
    master_seed: int,
    exact: Optional[float] = None,
) -> ConvergenceReport:
    n_grid = [int(n) for n in n_grid]
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise InputError("n_grid must be nonempty and strictly ascending")
    if trials < 1:
        raise InputError("need at least one trial")
    estimates, seeds = [], []
    for n in n_grid:
        row_seeds = [derive_seed(master_seed, n, t) for t in range(trials)]
        estimates.append([k_n_estimate(shifted_matrix(triple, target, n, s)) for s in row_seeds])
        seeds.append(row_seeds)
    if exact is None and isinstance(triple, LineTriple) and triple.law is not None:
        exact = exact_line_value(triple, target)
    return ConvergenceReport(n_grid, estimates, exact, trials, master_seed, seeds)


def nested_fragments(triple: SampledTriple, target, sizes, seed: int) -> list[tuple[int, float]]:
    """k_n along the growing fragments of one draw sequence (a single random matrix)."""
    sizes = [int(n) for n in sizes]
    big = shifted_matrix(triple, target, max(sizes), seed)
    out = []
    for n in sizes:
        out.append((n, solve_assignment(big.entries[:n, :n]).value / n))
    return out


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov distance between empirical CDFs."""
    return float(ks_2samp(a, b).statistic)
