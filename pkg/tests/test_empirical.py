"""Monte-Carlo estimator checks.

These compare the finite-width estimator against the analytic kernels;
the estimator measures the per-layer feature and derivative Grams of a
random network and assembles them along the kernel's layer structure,
so its error shrinks with both width and the number of draws.
"""

import numpy as np

from gntk import NtkConfig, empirical_ntk, ntk_exact, ntk_linear_closed

from conftest import cycle_graph, path_graph, random_row_stochastic


def rel_frob(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_linear_identity_diagonal_near_two():
    cfg = NtkConfig(depth=1, activation="linear")
    est = empirical_ntk(np.eye(4), None, cfg, width=4096, num_samples=32, seed=0)
    assert np.abs(np.diag(est.values) - 2.0).max() / 2.0 < 0.05


def test_relu_path_graph_depth_one():
    adj = path_graph(3)
    S = adj / adj.sum(axis=1, keepdims=True)
    cfg = NtkConfig(depth=1, activation="relu")
    exact = ntk_exact(S, np.eye(3), cfg).values
    est = empirical_ntk(S, np.eye(3), cfg, width=8192, num_samples=64, seed=1).values
    assert rel_frob(est, exact) < 0.05


def test_relu_width_convergence_monotone(rng):
    adj = (rng.uniform(size=(6, 6)) < 0.5).astype(float)
    adj = np.triu(adj, 1)
    adj = adj + adj.T
    adj[adj.sum(axis=1) == 0, :] = 0  # guard; regenerate if isolated
    assert (adj.sum(axis=1) > 0).all()
    S = adj / adj.sum(axis=1, keepdims=True)
    cfg = NtkConfig(depth=2, activation="relu")
    exact = ntk_exact(S, None, cfg).values
    errs = [rel_frob(empirical_ntk(S, None, cfg, width=w, num_samples=64, seed=3).values, exact)
            for w in (256, 1024, 4096)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.10


def test_sample_average_variance_scaling():
    # entry variance shrinks like 1/m between m=1 and m=64
    S = cycle_graph(4) / 2.0
    cfg = NtkConfig(depth=1, activation="relu")
    reps = 24
    singles = np.array([empirical_ntk(S, None, cfg, width=64, num_samples=1, seed=100 + t
                                      ).values[0, 1] for t in range(reps)])
    batched = np.array([empirical_ntk(S, None, cfg, width=64, num_samples=64, seed=200 + t
                                      ).values[0, 1] for t in range(reps)])
    ratio = singles.var() / batched.var()
    assert 16 < ratio < 256  # ~64 with wide Monte-Carlo slack


def test_skip_pc_matches_recursion_relu():
    S = cycle_graph(4) / 2.0
    for depth in (1, 2):
        cfg = NtkConfig(depth=depth, activation="relu", skip="pc", skip_activation="linear")
        exact = ntk_exact(S, None, cfg).values
        est = empirical_ntk(S, None, cfg, width=4096, num_samples=64, seed=7).values
        assert rel_frob(est, exact) < 0.05


def test_skip_alpha_matches_recursion_relu():
    S = cycle_graph(4) / 2.0
    cfg = NtkConfig(depth=2, activation="relu", skip="alpha", alpha=0.3,
                    skip_activation="linear")
    exact = ntk_exact(S, None, cfg).values
    est = empirical_ntk(S, None, cfg, width=4096, num_samples=64, seed=11).values
    assert rel_frob(est, exact) < 0.05


def test_linear_skip_closed_small_width_bias(rng):
    # linear everything: the estimator is unbiased, so even narrow widths
    # land close to the closed form
    S = random_row_stochastic(rng, 5)
    exact = ntk_linear_closed(S, 2).values
    cfg = NtkConfig(depth=2, activation="linear")
    est = empirical_ntk(S, None, cfg, width=1024, num_samples=64, seed=5).values
    assert rel_frob(est, exact) < 0.05


def test_deterministic_per_seed():
    S = cycle_graph(4) / 2.0
    cfg = NtkConfig(depth=1, activation="relu")
    a = empirical_ntk(S, None, cfg, width=128, num_samples=4, seed=9).values
    b = empirical_ntk(S, None, cfg, width=128, num_samples=4, seed=9).values
    np.testing.assert_array_equal(a, b)
