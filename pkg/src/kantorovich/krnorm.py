"""Kantorovich-Rubinshtein norm of zero-charge signed measures and its Lipschitz dual."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionError, DomainError
from .measures import TAU_MASS, CostSpace, DualPotential, SignedMeasure, jordan_decompose
from .transport import solve_mk


def _checked(m, cost):
    if not isinstance(m, SignedMeasure):
        m = SignedMeasure(m)
    if not isinstance(cost, CostSpace):
        cost = CostSpace.metric(cost)
    if not cost.is_metric:
        raise DomainError("the KR norm needs a metric cost")
    if len(m) != cost.size:
        raise DimensionError("measure and cost sizes differ")
    if abs(m.charge) > TAU_MASS:
        raise DomainError(f"measure has nonzero charge {m.charge!r}")
    return m, cost


def kr_norm(m, cost) -> float:
    """Transport distance between the normalized positive and negative parts, times their mass."""
    m, cost = _checked(m, cost)
    pos, neg, mass = jordan_decompose(m)
    if mass == 0.0:
        return 0.0
    # Both parts are rescaled to unit mass; the normalization absorbs charge below TAU_MASS.
    value = solve_mk(cost, pos / pos.sum(), neg / neg.sum()).value
    return value * mass


def lipschitz_dual(m, cost) -> tuple[float, DualPotential]:
    """Maximize ``sum u_i m_i`` over 1-Lipschitz ``u`` with ``u_0 = 0`` as an explicit LP."""
    m, cost = _checked(m, cost)
    n = cost.size
    w = m.weights
    if n == 1 or not np.any(w):
        return 0.0, DualPotential(np.zeros(n))
    i, j = np.nonzero(~np.eye(n, dtype=bool))
    A = np.zeros((i.size, n))
    A[np.arange(i.size), i] = 1.0
    A[np.arange(i.size), j] = -1.0
    bounds = [(0.0, 0.0)] + [(None, None)] * (n - 1)
    res = linprog(
        -w,
        A_ub=A,
        b_ub=cost.costs[i, j],
        bounds=bounds,
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise RuntimeError(f"dual LP failed: {res.message}")
    u = res.x - res.x[0]
    return float(u @ w), DualPotential(u)
