import numpy as np
import pytest


def random_metric(rng, n, kind=None):
    """Distances between random points; one of a few norms, or a random graph metric."""
    kind = kind or rng.choice(["l1", "l2", "graph"])
    if kind == "graph":
        W = rng.random((n, n)) * 2 + 0.1
        W = np.minimum(W, W.T)
        np.fill_diagonal(W, 0)
        for k in range(n):  # Floyd-Warshall closure
            W = np.minimum(W, W[:, k][:, None] + W[k, :][None, :])
        return W
    pts = rng.random((n, int(rng.integers(1, 4))))
    return np.linalg.norm(pts[:, None] - pts[None], ord=1 if kind == "l1" else 2, axis=2)


def random_distribution(rng, n, sparse=False):
    w = rng.random(n)
    if sparse:
        w[rng.random(n) < 0.4] = 0.0
        if w.sum() == 0:
            w[0] = 1.0
    return w / w.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
