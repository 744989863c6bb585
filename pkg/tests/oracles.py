"""Brute-force reference computations, kept independent of the package's solvers."""

import itertools
import math

import numpy as np


def transport_vertices(cost, a, b):
    """All vertices of the transportation polytope, as (value, plan) pairs.

    Enumerates every choice of n+m-1 basic cells, solves the marginal
    equations on that basis, and keeps the nonnegative solutions.
    """
    C = np.asarray(cost, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n, m = C.shape
    A = np.zeros((n + m, n * m))
    for i in range(n):
        A[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        A[n + j, j::m] = 1.0
    A, rhs = A[:-1], np.concatenate([a, b])[:-1]  # one marginal equation is redundant
    r = n + m - 1
    combos = np.array(list(itertools.combinations(range(n * m), r)))
    sub = A[:, combos].transpose(1, 0, 2)  # (k, r, r)
    ok = np.abs(np.linalg.det(sub)) > 1e-9
    combos, sub = combos[ok], sub[ok]
    x = np.linalg.solve(sub, np.broadcast_to(rhs, (len(sub), r))[..., None])[..., 0]
    feasible = np.all(x >= -1e-12, axis=1)
    out = []
    for cols, xs in zip(combos[feasible], x[feasible]):
        plan = np.zeros(n * m)
        plan[cols] = np.clip(xs, 0.0, None)
        plan = plan.reshape(n, m)
        out.append((float((plan * C).sum()), plan))
    return out


def transport_min(cost, a, b):
    return min(v for v, _ in transport_vertices(cost, a, b))


def permutation_min(cost):
    C = np.asarray(cost, dtype=float)
    n = C.shape[0]
    return min(math.fsum(C[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def path_enumeration(P, state, n):
    """Word probabilities by walking every path explicitly."""
    P = np.asarray(P, dtype=float)
    s = P.shape[0]
    out = []
    for word in itertools.product(range(s), repeat=n):
        prob, cur = 1.0, state
        for x in word:
            prob *= P[cur, x]
            cur = x
        out.append(prob)
    return np.array(out)


def grid_entropy(nu, cost, eps, step=1e-3):
    """Minimum entropy over measures on one or two of nu's atoms, weights on a grid."""
    nu = np.asarray(nu, dtype=float)
    n = nu.size
    best = math.inf
    grid = np.round(np.arange(0, 1 + step / 2, step), 12)
    for i in range(n):
        l = np.zeros(n)
        l[i] = 1.0
        if transport_min(cost, l, nu) <= eps - 1e-12:
            best = min(best, 0.0)
        for j in range(i + 1, n):
            for w in grid:
                l = np.zeros(n)
                l[i], l[j] = w, 1 - w
                if transport_min(cost, l, nu) <= eps - 1e-12:
                    p = l[l > 0]
                    best = min(best, float(-(p * np.log(p)).sum()))
    return best


def nested_distance(tree_children, base_cost, level, a, b, memo=None):
    """Iterated transport distance computed by direct recursion over nested measures.

    ``tree_children[level][a]`` maps class ``a`` to ``[(child, weight), ...]``.
    """
    memo = {} if memo is None else memo
    if level == 0:
        return float(base_cost[a, b])
    key = (level, a, b)
    if key not in memo:
        ca, cb = tree_children[level][a], tree_children[level][b]
        C = np.array([[nested_distance(tree_children, base_cost, level - 1, x, y, memo) for y, _ in cb] for x, _ in ca])
        memo[key] = transport_min(C, [w for _, w in ca], [w for _, w in cb])
    return memo[key]


def nested_children(masses, levels):
    """Children lists per level from leaf labels; level-0 classes are the leaves."""
    masses = np.asarray(masses, dtype=float)
    children = [None]
    prev = np.arange(masses.size)
    for lv in levels:
        lv = np.asarray(lv)
        table = {}
        for cls in np.unique(lv):
            kids = np.unique(prev[lv == cls])
            mass = {k: masses[prev == k].sum() for k in kids}
            total = sum(mass.values())
            table[int(cls)] = [(int(k), mass[k] / total) for k in kids]
        children.append(table)
        prev = lv
    return children
