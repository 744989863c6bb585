"""Exact finite transport: network simplex on the transportation LP.

Degeneracy is handled with Orden's perturbation: every supply gets ``+eps`` and
the last demand ``+n*eps``.  Flows are carried as pairs ``(x, k)`` meaning
``x + k*eps`` and compared lexicographically, so every basis is nondegenerate
and the simplex cannot cycle.  The final flows are recomputed on the optimal
tree from the unperturbed marginals.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, InputError
from .measures import (
    TAU_MARG,
    CostSpace,
    DualPotential,
    FiniteDistribution,
    TransportPlan,
)

TAU_OBJ = 1e-9
TAU_GAP = 1e-9

_TIE = 1e-13
MAX_PIVOTS = 1_000_000


@dataclass(frozen=True)
class TransportSolution:
    plan: TransportPlan
    value: float
    potential: DualPotential
    # Column-side dual variables; equal to -potential on the support for metric costs.
    target_potential: np.ndarray
    iterations: int

    def dual_value(self) -> float:
        return float(
            self.potential.values @ self.plan.source.weights
            + self.target_potential @ self.plan.target.weights
        )


@dataclass
class VerifyReport:
    optimal: bool
    violations: list


def _lex_less(x1, k1, x2, k2) -> bool:
    if abs(x1 - x2) > _TIE:
        return x1 < x2
    return k1 < k2


def _northwest_corner(a, b):
    n, m = len(a), len(b)
    edges = {}
    i = j = 0
    ra, rk = a[0], 1
    cb, ck = b[0], (n if m == 1 else 0)
    while True:
        if i == n - 1 and j == m - 1:
            edges[(i, j)] = [ra, rk]
            return edges
        if j == m - 1 or (i < n - 1 and _lex_less(ra, rk, cb, ck)):
            edges[(i, j)] = [ra, rk]
            cb, ck = cb - ra, ck - rk
            i += 1
            ra, rk = a[i], 1
        else:
            edges[(i, j)] = [cb, ck]
            ra, rk = ra - cb, rk - ck
            j += 1
            cb, ck = b[j], (n if j == m - 1 else 0)


def _tree_potentials(C, adj, n, m):
    """Duals ``u_i + v_j = c_ij`` on tree edges, plus BFS parents and depths."""
    total = n + m
    pot = [0.0] * total
    parent = [-1] * total
    depth = [0] * total
    seen = [False] * total
    seen[0] = True
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for nb in adj[node]:
            if seen[nb]:
                continue
            seen[nb] = True
            parent[nb] = node
            depth[nb] = depth[node] + 1
            if node < n:
                pot[nb] = C[node, nb - n] - pot[node]
            else:
                pot[nb] = C[nb, node - n] - pot[node]
            queue.append(nb)
    return np.array(pot[:n]), np.array(pot[n:]), parent, depth


def _tree_flows(adj, a, b, n, m):
    """Unique flows on a spanning tree of the bipartite graph for marginals a, b."""
    residual = list(a) + [-x for x in b]
    degree = [len(s) for s in adj]
    remaining = [set(s) for s in adj]
    flows = {}
    leaves = deque(v for v in range(n + m) if degree[v] == 1)
    while leaves:
        leaf = leaves.popleft()
        if degree[leaf] != 1:
            continue
        (nb,) = remaining[leaf]
        f = residual[leaf] if leaf < n else -residual[leaf]
        edge = (leaf, nb - n) if leaf < n else (nb, leaf - n)
        flows[edge] = f
        if leaf < n:
            residual[nb] += f
        else:
            residual[nb] -= f
        residual[leaf] = 0.0
        remaining[nb].discard(leaf)
        remaining[leaf].clear()
        degree[leaf] = 0
        degree[nb] -= 1
        if degree[nb] == 1:
            leaves.append(nb)
    return flows


def _network_simplex(C, a, b):
    n, m = C.shape
    edges = _northwest_corner(a, b)
    adj = [set() for _ in range(n + m)]
    for i, j in edges:
        adj[i].add(n + j)
        adj[n + j].add(i)
    tol = 1e-12 * max(1.0, float(np.abs(C).max()))
    pivots = 0
    while True:
        u, v, parent, depth = _tree_potentials(C, adj, n, m)
        reduced = C - u[:, None] - v[None, :]
        flat = int(np.argmin(reduced))
        if reduced.flat[flat] >= -tol:
            break
        if pivots >= MAX_PIVOTS:
            raise RuntimeError("network simplex exceeded the pivot limit")
        pivots += 1
        i, j = divmod(flat, m)

        # Tree path from column node j to row node i; edges alternate -, +, ..., -.
        up_j, up_i = [n + j], [i]
        x, y = n + j, i
        while depth[x] > depth[y]:
            x = parent[x]
            up_j.append(x)
        while depth[y] > depth[x]:
            y = parent[y]
            up_i.append(y)
        while x != y:
            x, y = parent[x], parent[y]
            up_j.append(x)
            up_i.append(y)
        path = up_j + up_i[-2::-1]
        cycle = []
        for p, q in zip(path, path[1:]):
            cycle.append((p, q - n) if p < n else (q, p - n))

        leave = None
        for e in cycle[0::2]:
            fx, fk = edges[e]
            if leave is None or _lex_less(fx, fk, *edges[leave]):
                leave = e
        tx, tk = edges[leave]
        for pos, e in enumerate(cycle):
            sign = -1 if pos % 2 == 0 else 1
            edges[e][0] += sign * tx
            edges[e][1] += sign * tk
        edges[(i, j)] = [tx, tk]
        del edges[leave]
        r, c = leave
        adj[r].discard(n + c)
        adj[n + c].discard(r)
        adj[i].add(n + j)
        adj[n + j].add(i)

    flows = _tree_flows(adj, a, b, n, m)
    plan = np.zeros((n, m))
    for (r, c), f in flows.items():
        plan[r, c] = f
    return plan, u, v, pivots


def _as_distribution(d) -> FiniteDistribution:
    return d if isinstance(d, FiniteDistribution) else FiniteDistribution(d)


def _cost_matrix(cost) -> np.ndarray:
    c = cost.costs if isinstance(cost, CostSpace) else np.array(cost, dtype=float)
    if c.ndim != 2:
        raise DimensionError(f"cost must be a matrix, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise InputError("cost matrix contains non-finite entries")
    return c


def solve_mk(cost, mu, nu) -> TransportSolution:
    """Optimal transport between ``mu`` and ``nu`` for an ``n x m`` cost.

    Returns the optimal plan, its value, and duals ``(u, v)`` with
    ``u_i + v_j <= c_ij`` and equality on the plan's support, normalized so
    that ``u_0 = 0``.  For a metric cost on a common support ``u`` is itself a
    1-Lipschitz potential.
    """
    C = _cost_matrix(cost)
    mu, nu = _as_distribution(mu), _as_distribution(nu)
    if C.shape != (len(mu), len(nu)):
        raise DimensionError(
            f"cost shape {C.shape} does not match marginals ({len(mu)}, {len(nu)})"
        )
    a, b = mu.weights.tolist(), nu.weights.tolist()
    plan, u, v, pivots = _network_simplex(C, a, b)
    assert plan.min() > -1e-9, "transportation problem reported infeasible"
    plan = np.maximum(plan, 0.0)
    shift = u[0]
    return TransportSolution(
        plan=TransportPlan(plan, mu, nu),
        value=float((plan * C).sum()),
        potential=DualPotential(u - shift),
        target_potential=v + shift,
        iterations=pivots,
    )


def solve_kp(cost, mu, nu, p: float) -> float:
    """``p``-Kantorovich value: optimal cost for ``c**p``, then the ``1/p`` root."""
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    C = _cost_matrix(cost)
    value = solve_mk(C**p, mu, nu).value
    return max(value, 0.0) ** (1.0 / p)


def duality_gap(sol: TransportSolution, mu=None, nu=None) -> float:
    """Primal value minus the dual objective of the solution's potentials."""
    mu = sol.plan.source if mu is None else _as_distribution(mu)
    nu = sol.plan.target if nu is None else _as_distribution(nu)
    dual = sol.potential.values @ mu.weights + sol.target_potential @ nu.weights
    return float(sol.value - dual)


def verify_optimal(sol: TransportSolution, cost, tol: float = TAU_GAP) -> VerifyReport:
    """Check the Lipschitz-potential optimality certificate for a metric cost.

    The potential must be 1-Lipschitz everywhere and satisfy
    ``U_i - U_j = c_ij`` on every cell carrying positive mass.
    """
    if not isinstance(cost, CostSpace):
        cost = CostSpace.metric(cost)
    if not cost.is_metric:
        raise DomainError("optimality certificate requires a metric cost")
    C = cost.costs
    if sol.plan.entries.shape != C.shape:
        raise DimensionError("plan and cost shapes differ")
    if not sol.plan.is_feasible():
        raise InputError("plan is not feasible for its marginals")
    U = sol.potential.values
    diff = U[:, None] - U[None, :]
    violations = []
    for i, j in np.argwhere(diff - C > tol):
        violations.append(("lipschitz", int(i), int(j), float(diff[i, j] - C[i, j])))
    for i, j in np.argwhere(sol.plan.entries > TAU_MARG):
        if abs(diff[i, j] - C[i, j]) > tol:
            violations.append(("support", int(i), int(j), float(diff[i, j] - C[i, j])))
    return VerifyReport(not violations, violations)


def with_plan(sol: TransportSolution, entries, cost=None) -> TransportSolution:
    """Copy of ``sol`` carrying a different plan (value recomputed when cost given)."""
    plan = TransportPlan(entries, sol.plan.source, sol.plan.target)
    value = sol.value if cost is None else float((plan.entries * _cost_matrix(cost)).sum())
    return TransportSolution(plan, value, sol.potential, sol.target_potential, sol.iterations)


def with_potential(sol: TransportSolution, values) -> TransportSolution:
    """Copy of ``sol`` paired with a symmetric potential pair ``(U, -U)``."""
    U = np.asarray(values, dtype=float)
    return TransportSolution(sol.plan, sol.value, DualPotential(U), -U, sol.iterations)
