"""Finite-state Markov chains: conditional futures under the Hamming metric, the
d-bar double integral, and epsilon-entropy of the future-distribution law."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, DomainError, ResourceError
from .measures import TAU_MASS, CostSpace, FiniteDistribution
from .transport import solve_mk

WORD_CAP = 4096
# Strict "< eps" is enforced as "<= eps - EPS_SLACK".
EPS_SLACK = 1e-12
MAX_ATOMS = 4
ENTROPY_CAP = 2_000_000


@dataclass(frozen=True)
class MarkovChain:
    transition: np.ndarray
    stationary: Optional[FiniteDistribution] = None

    def __post_init__(self):
        P = np.array(self.transition, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DimensionError(f"transition must be square, got shape {P.shape}")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1) > TAU_MASS):
            raise DomainError("transition matrix is not row-stochastic")
        pi = self.stationary
        if pi is None:
            pi = FiniteDistribution(_stationary(P))
        elif not isinstance(pi, FiniteDistribution):
            pi = FiniteDistribution(pi)
        if len(pi) != P.shape[0]:
            raise DimensionError("stationary vector has the wrong length")
        if np.abs(pi.weights @ P - pi.weights).max() > TAU_MASS:
            raise DomainError("given distribution is not stationary for the chain")
        P.setflags(write=False)
        object.__setattr__(self, "transition", P)
        object.__setattr__(self, "stationary", pi)

    @property
    def states(self) -> int:
        return self.transition.shape[0]

    @classmethod
    def iid(cls, q) -> "MarkovChain":
        q = np.asarray(q, dtype=float)
        return cls(np.tile(q, (q.size, 1)))

    @classmethod
    def sticky(cls, stay: float, states: int = 2) -> "MarkovChain":
        move = (1 - stay) / (states - 1)
        P = np.full((states, states), move)
        np.fill_diagonal(P, stay)
        return cls(P)


def _stationary(P: np.ndarray) -> np.ndarray:
    s = P.shape[0]
    A = np.vstack([P.T - np.eye(s), np.ones(s)])
    rhs = np.zeros(s + 1)
    rhs[-1] = 1.0
    pi = np.linalg.lstsq(A, rhs, rcond=None)[0]
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def _check_cap(s: int, n: int):
    if n < 1:
        raise DomainError("horizon must be at least 1")
    if s**n > WORD_CAP:
        raise ResourceError(f"{s}^{n} words exceeds the enumeration cap {WORD_CAP}")


def words(n: int, s: int) -> np.ndarray:
    """All words of length ``n`` over ``range(s)`` in lexicographic order."""
    _check_cap(s, n)
    return np.array(list(itertools.product(range(s), repeat=n)), dtype=int).reshape(-1, n)


def hamming_cost(n: int, s: int) -> CostSpace:
    w = words(n, s)
    h = (w[:, None, :] != w[None, :, :]).sum(axis=2) / n
    return CostSpace(h, is_metric=True)


def conditional_future(chain: MarkovChain, state: int, n: int) -> FiniteDistribution:
    """Law of ``(x_1..x_n)`` given current state, over lexicographically ordered words."""
    s = chain.states
    _check_cap(s, n)
    P = chain.transition
    probs = P[state].copy()
    for _ in range(n - 1):
        probs = _extend(probs, P)
    return FiniteDistribution(probs / probs.sum())


def _extend(probs: np.ndarray, P: np.ndarray) -> np.ndarray:
    s = P.shape[0]
    last = np.arange(probs.size) % s
    return (probs[:, None] * P[last]).reshape(-1)


def future_distances(chain: MarkovChain, n: int) -> np.ndarray:
    """Kantorovich distances under ``h_n`` between the futures of every pair of states."""
    cost = hamming_cost(n, chain.states)
    futures = [conditional_future(chain, a, n) for a in range(chain.states)]
    s = chain.states
    D = np.zeros((s, s))
    for a in range(s):
        for b in range(a + 1, s):
            D[a, b] = D[b, a] = _restricted_mk(cost.costs, futures[a].weights, futures[b].weights)
    return D


def _restricted_mk(C, p, q) -> float:
    # Zero-mass words carry no flow; dropping them keeps the LP small.
    i, j = np.flatnonzero(p > 0), np.flatnonzero(q > 0)
    return solve_mk(C[np.ix_(i, j)], p[i] / p[i].sum(), q[j] / q[j].sum()).value


def dbar_criterion(chain: MarkovChain, n: int) -> float:
    """Stationary-weighted mean transport distance between conditional futures."""
    pi = chain.stationary.weights
    D = future_distances(chain, n)
    return float(pi @ D @ pi)


def entropy(weights) -> float:
    w = np.asarray(weights, dtype=float)
    w = w[w > 0]
    h = float(-(w * np.log(w)).sum())
    # A point mass carried as 1 - 1ulp reads as ~1e-16; report it as zero.
    return h if h > 1e-14 else 0.0


@dataclass(frozen=True)
class EntropyBound:
    value: float
    measure: np.ndarray
    upper_bound: bool = True


def epsilon_entropy(nu, cost, eps: float) -> EntropyBound:
    """Smallest entropy of a measure within transport distance ``eps`` of ``nu``.

    Candidates are measures on at most ``MAX_ATOMS`` of ``nu``'s support
    points, with arbitrary real weights.  For a fixed atom set the feasible
    measures form a polytope (the image of couplings of cost ``<= eps``) and
    entropy is concave, so the minimum sits at an image of a vertex coupling:
    every source atom is sent whole to one candidate atom, except possibly one
    source split so that the cost constraint is tight.  All such vertices are
    enumerated.  The result is an upper bound on the infimum over all
    discrete measures.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    w = nu.weights if isinstance(nu, FiniteDistribution) else FiniteDistribution(nu).weights
    C = cost.costs if isinstance(cost, CostSpace) else np.asarray(cost, dtype=float)
    if C.shape != (w.size, w.size):
        raise DimensionError("cost does not match the distribution")
    budget = eps - EPS_SLACK
    support = np.flatnonzero(w > 0)
    p = w[support]
    D = C[np.ix_(support, support)]
    m = support.size
    work = sum(math.comb(m, k) * k**m for k in range(1, min(MAX_ATOMS, m) + 1))
    if work > ENTROPY_CAP:
        raise ResourceError(f"epsilon-entropy search over {m} atoms is too large")

    best_h, best = entropy(w), w.copy()

    def consider(pushed: np.ndarray):
        nonlocal best_h, best
        h = entropy(pushed)
        if h < best_h - 1e-15:
            best_h = h
            best = np.zeros_like(w)
            best[support] = pushed

    for k in range(1, min(MAX_ATOMS, m) + 1):
        for atoms in itertools.combinations(range(m), k):
            atoms = np.array(atoms)
            maps = np.array(list(itertools.product(range(k), repeat=m)), dtype=int).reshape(-1, m)
            dest = atoms[maps]  # (n_maps, m)
            costs = (p[None, :] * D[np.arange(m)[None, :], dest]).sum(axis=1)
            feasible = costs <= budget
            for row in np.flatnonzero(feasible):
                consider(np.bincount(dest[row], weights=p, minlength=m))
            # Split vertices on edges leaving the feasible set through one source.
            for row in np.flatnonzero(feasible):
                base = dest[row]
                for src in range(m):
                    for alt in atoms:
                        extra = p[src] * (D[src, alt] - D[src, base[src]])
                        if extra <= 0 or costs[row] + extra <= budget:
                            continue
                        t = (budget - costs[row]) / extra
                        pushed = np.bincount(base, weights=p, minlength=m)
                        pushed[base[src]] -= t * p[src]
                        pushed[alt] += t * p[src]
                        consider(np.clip(pushed, 0.0, None))
    return EntropyBound(best_h, best)


def future_law(chain: MarkovChain, n: int) -> tuple[FiniteDistribution, CostSpace]:
    """The law of the conditional-future map: atoms per state with stationary masses,
    and the transport metric between those atoms."""
    return chain.stationary, CostSpace(future_distances(chain, n), is_metric=True)


def secondary_entropy_curve(chain: MarkovChain, n_range, eps: float) -> list[float]:
    out = []
    for n in n_range:
        masses, metric = future_law(chain, n)
        out.append(epsilon_entropy(masses, metric, eps).value)
    return out
