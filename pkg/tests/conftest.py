import numpy as np
import pytest

from gntk import DcSbmParams, make_pi


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_row_stochastic(rng, n: int) -> np.ndarray:
    """A dense positive operator with unit row sums (generic non-normal S)."""
    a = rng.uniform(size=(n, n)) + 0.1
    return a / a.sum(axis=1, keepdims=True)


def path_graph(n: int) -> np.ndarray:
    adj = np.zeros((n, n))
    for i in range(n - 1):
        adj[i, i + 1] = adj[i + 1, i] = 1.0
    return adj


def cycle_graph(n: int) -> np.ndarray:
    adj = np.zeros((n, n))
    for i in range(n):
        adj[i, (i + 1) % n] = adj[(i + 1) % n, i] = 1.0
    return adj


def uniform_model(n: int, p: float = 0.8, q: float = 0.1, num_classes: int = 2) -> DcSbmParams:
    return DcSbmParams(n=n, num_classes=num_classes, p=p, q=q,
                       pi=make_pi(n, num_classes, "uniform"))


def unif01_model(n: int, seed: int = 0, p: float = 0.8, q: float = 0.1) -> DcSbmParams:
    return DcSbmParams(n=n, num_classes=2, p=p, q=q, pi=make_pi(n, 2, "unif01", seed=seed))
