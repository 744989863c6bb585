import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_metric
from oracles import nested_children, nested_distance
from kantorovich.errors import DimensionError, InputError
from kantorovich.measures import CostSpace, validate_metric
from kantorovich.tower import (
    PartitionTree,
    barycenter_project,
    dyadic_tree,
    lift,
    quotient_step,
    spread,
    tower_levels,
    tower_statistic,
)

LINE4 = np.abs(np.arange(4)[:, None] - np.arange(4)[None, :]).astype(float)


def random_tree(rng, n, depth, zero_some=False):
    """Nested partitions built by merging random groups of the previous level's classes."""
    labels = np.arange(n)
    levels = []
    for _ in range(depth):
        classes = np.unique(labels)
        groups = rng.integers(0, max(1, classes.size // 2), size=classes.size)
        lookup = dict(zip(classes, groups))
        labels = np.array([lookup[c] for c in labels])
        levels.append(labels)
    masses = rng.random(n)
    if zero_some:
        masses[rng.random(n) < 0.3] = 0.0
        masses[0] = max(masses[0], 0.1)
    return PartitionTree(masses / masses.sum(), random_metric(rng, n), tuple(levels))


def test_singleton_partition_is_isometric(rng):
    C = random_metric(rng, 7)
    tree = PartitionTree(np.full(7, 1 / 7), C, (np.arange(7), np.arange(7)))
    for space in tower_levels(tree):
        np.testing.assert_array_equal(space.metric, C)
    assert tower_statistic(tree, 2) == tower_statistic(tree, 0)


def test_single_class_has_zero_spread():
    tree = PartitionTree(np.full(4, 0.25), LINE4, (np.zeros(4, int),))
    top = tower_levels(tree)[-1]
    np.testing.assert_array_equal(top.metric, [[0.0]])
    assert spread(top) == 0.0


def test_zero_metric_statistic():
    tree = PartitionTree(np.full(3, 1 / 3), np.zeros((3, 3)), ())
    assert tower_statistic(tree, 0) == 0.0


def test_four_leaf_pairing():
    tree = PartitionTree(np.full(4, 0.25), LINE4, ([0, 0, 1, 1],))
    top = tower_levels(tree)[-1]
    assert top.metric[0, 1] == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(top.conditionals, [[0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5]])


@pytest.mark.parametrize("metric", ["phi", "first"])
def test_dyadic_depth4_against_nested_oracle(metric):
    tree = dyadic_tree(4)
    base = tree.base_cost
    if metric == "first":
        first = np.arange(16) >> 3
        base = (first[:, None] != first[None, :]).astype(float)
        tree = PartitionTree(tree.masses, base, tree.levels)
    children = nested_children(tree.masses, tree.levels)
    spaces = tower_levels(tree)
    for k in range(1, 5):
        space = spaces[k]
        ids = np.unique(tree.levels[k - 1])
        memo = {}
        for a in range(space.size):
            for b in range(space.size):
                expected = nested_distance(children, base, k, int(ids[a]), int(ids[b]), memo)
                assert space.metric[a, b] == pytest.approx(expected, abs=1e-12)
    if metric == "first":
        # Forgetting the only coordinate the metric sees collapses everything.
        assert spread(spaces[1]) == 0.0


def test_barycenter_examples():
    tree = PartitionTree([0.1, 0.2, 0.3, 0.4], LINE4, ([0, 0, 1, 1],))
    top = tower_levels(tree)[-1]
    np.testing.assert_allclose(barycenter_project([1.0, 0.0], top.conditionals), [1 / 3, 2 / 3, 0, 0])
    np.testing.assert_allclose(barycenter_project(top.masses, top.conditionals), tree.masses, atol=1e-15)
    by_hand = 0.2 * np.array([1 / 3, 2 / 3, 0, 0]) + 0.8 * np.array([0, 0, 3 / 7, 4 / 7])
    np.testing.assert_allclose(barycenter_project([0.2, 0.8], top.conditionals), by_hand, atol=1e-15)
    with pytest.raises(InputError):
        barycenter_project([0.5, 0.6], top.conditionals)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_projection_after_lift_is_identity(n, depth, seed):
    rng = np.random.default_rng(seed)
    tree = random_tree(rng, n, depth)
    spaces = tower_levels(tree)
    for lower, upper in zip(spaces, spaces[1:]):
        lifted = lift(upper, lower.masses)
        np.testing.assert_allclose(lifted, upper.masses, atol=1e-15)
        np.testing.assert_allclose(barycenter_project(upper.masses, upper.conditionals), lower.masses, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_semimetric_axioms_per_level(n, depth, seed):
    rng = np.random.default_rng(seed)
    for space in tower_levels(random_tree(rng, n, depth)):
        D = space.metric
        assert np.all(D >= 0)
        np.testing.assert_allclose(D, D.T, atol=1e-12)
        assert np.all(np.diag(D) == 0)
        bad = [v for v in validate_metric(CostSpace(D), tol=1e-9).violations if v[0] == "triangle"]
        assert not bad


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_quotient_distances_never_exceed_level_below(n, seed):
    rng = np.random.default_rng(seed)
    tree = random_tree(rng, n, 2)
    spaces = tower_levels(tree)
    assert spread(spaces[2]) <= spread(spaces[1]) + 1e-12 <= spread(spaces[0]) + 2e-12


def test_dyadic_benchmark_decreases_to_zero():
    tree = dyadic_tree(7, 6)
    stats = [tower_statistic(tree, k) for k in range(1, 7)]
    assert all(b < a for a, b in zip(stats, stats[1:]))
    assert stats[-1] < 0.05


def test_tree_validation():
    with pytest.raises(InputError):
        PartitionTree(np.full(4, 0.25), LINE4, ([0, 0, 1, 1], [0, 1, 1, 1]))
    with pytest.raises(DimensionError):
        PartitionTree(np.full(4, 0.25), LINE4, ([0, 0, 1],))
    with pytest.raises(DimensionError):
        PartitionTree(np.full(3, 1 / 3), LINE4, ())
    space = tower_levels(PartitionTree(np.full(4, 0.25), LINE4, ()))[0]
    with pytest.raises(DimensionError):
        quotient_step(space, [0, 0, 1])


def test_zero_mass_class_dropped_with_warning(caplog):
    tree = PartitionTree([0.5, 0.5, 0.0, 0.0], LINE4, ([0, 0, 1, 1],))
    with caplog.at_level(logging.WARNING):
        top = tower_levels(tree)[-1]
    assert "zero-mass" in caplog.text
    assert top.size == 1
    np.testing.assert_array_equal(top.leaf_class, [0, 0, -1, -1])


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 10), st.integers(0, 2**32 - 1))
def test_null_leaves_do_not_change_live_distances(n, seed):
    rng = np.random.default_rng(seed)
    tree = random_tree(rng, n, 2, zero_some=True)
    logging.disable(logging.WARNING)
    try:
        spaces = tower_levels(tree)
    finally:
        logging.disable(logging.NOTSET)
    for space in spaces[1:]:
        assert np.all(space.masses > 0)
        assert space.masses.sum() == pytest.approx(1.0, abs=1e-12)
