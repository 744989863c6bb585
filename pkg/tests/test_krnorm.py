import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_distribution, random_metric
from oracles import transport_min
from kantorovich.errors import DomainError
from kantorovich.krnorm import kr_norm, lipschitz_dual
from kantorovich.measures import CostSpace, FiniteDistribution, SignedMeasure
from kantorovich.transport import solve_mk

LINE3 = CostSpace.metric([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
M3 = [0.3, -0.5, 0.2]
# Two sources {0, 2} with masses (0.3, 0.2) into the single sink 1: vertex oracle.
M3_NORM = 0.5


def random_zero_charge(rng, n):
    w = rng.normal(size=n)
    w[rng.random(n) < 0.3] = 0.0
    w -= w.mean()
    return w


def test_zero_measure():
    assert kr_norm([0, 0, 0], LINE3) == 0.0
    value, witness = lipschitz_dual([0, 0, 0], LINE3)
    assert value == 0.0
    assert witness.lipschitz_excess(LINE3.costs) <= 1e-12


def test_point_mass_difference(rng):
    C = CostSpace.metric(random_metric(rng, 6))
    m = np.zeros(6)
    m[1], m[4] = 1, -1
    assert kr_norm(m, C) == pytest.approx(C.costs[1, 4], abs=1e-12)
    value, u = lipschitz_dual(m, C)
    assert value == pytest.approx(C.costs[1, 4], abs=1e-9)
    assert u.values[1] - u.values[4] == pytest.approx(C.costs[1, 4], abs=1e-9)


def test_three_point_example_against_oracle():
    oracle = 0.5 * transport_min(LINE3.costs[np.ix_([0, 2], [1])], [0.6, 0.4], [1.0])
    assert oracle == pytest.approx(M3_NORM, abs=1e-12)
    assert kr_norm(M3, LINE3) == pytest.approx(M3_NORM, abs=1e-9)
    value, u = lipschitz_dual(M3, LINE3)
    assert value == pytest.approx(M3_NORM, abs=1e-9)
    assert u.values[0] == 0.0


def test_nonzero_charge_rejected():
    with pytest.raises(DomainError):
        kr_norm([0.3, 0.2, 0.0], LINE3)
    with pytest.raises(DomainError):
        lipschitz_dual([0.3, 0.2, 0.0], LINE3)


def test_requires_metric():
    with pytest.raises(DomainError):
        kr_norm([1, -1], CostSpace([[0, 1], [2, 0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_duality(n, seed):
    rng = np.random.default_rng(seed)
    C = CostSpace.metric(random_metric(rng, n))
    m = random_zero_charge(rng, n)
    value, u = lipschitz_dual(m, C)
    assert kr_norm(m, C) == pytest.approx(value, abs=1e-9)
    assert u.lipschitz_excess(C.costs) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 20), st.floats(-5, 5), st.integers(0, 2**32 - 1))
def test_norm_axioms(n, lam, seed):
    rng = np.random.default_rng(seed)
    C = CostSpace.metric(random_metric(rng, n))
    m1, m2 = random_zero_charge(rng, n), random_zero_charge(rng, n)
    assert kr_norm(lam * m1, C) == pytest.approx(abs(lam) * kr_norm(m1, C), abs=1e-9)
    assert kr_norm(m1 + m2, C) <= kr_norm(m1, C) + kr_norm(m2, C) + 1e-9
    if np.any(m1 != 0):
        assert kr_norm(m1, C) > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_consistent_with_transport(n, seed):
    rng = np.random.default_rng(seed)
    C = CostSpace.metric(random_metric(rng, n))
    mu, nu = FiniteDistribution(random_distribution(rng, n)), FiniteDistribution(random_distribution(rng, n))
    assert kr_norm(SignedMeasure.difference(mu, nu), C) == pytest.approx(solve_mk(C, mu, nu).value, abs=1e-9)
