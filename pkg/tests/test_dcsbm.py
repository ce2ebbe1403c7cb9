import numpy as np
import pytest

from gntk import (DcSbmParams, Graph, ParameterError, block_labels, make_pi,
                  population_adjacency, remove_isolated, sample_graph)

from conftest import uniform_model, unif01_model


class TestParams:
    def test_rejects_q_above_p(self):
        with pytest.raises(ParameterError):
            DcSbmParams(n=4, num_classes=2, p=0.1, q=0.8, pi=np.full(4, 0.25))

    def test_rejects_unnormalized_pi(self):
        # the "pi_i = 1 for all i" override is not a valid parameter set
        with pytest.raises(ParameterError):
            DcSbmParams(n=4, num_classes=2, p=1.0, q=1.0, pi=np.ones(4))

    def test_rejects_pi_sum_off(self):
        pi = np.full(4, 0.25) + 1e-6
        with pytest.raises(ParameterError):
            DcSbmParams(n=4, num_classes=2, p=0.8, q=0.1, pi=pi)

    def test_rejects_empty_class(self):
        with pytest.raises(ParameterError):
            DcSbmParams(n=4, num_classes=2, p=0.8, q=0.1, pi=np.full(4, 0.25),
                        labels=np.zeros(4, dtype=int))

    def test_r_and_class_sums(self):
        params = uniform_model(4)
        assert params.r == pytest.approx(7 / 9)
        np.testing.assert_allclose(params.class_pi_sq_sums(), [0.125, 0.125])


class TestPopulationAdjacency:
    def test_two_node_example(self):
        params = DcSbmParams(n=2, num_classes=2, p=0.8, q=0.1,
                             pi=np.array([0.5, 0.5]), labels=np.array([0, 1]))
        m = population_adjacency(params).adjacency
        np.testing.assert_allclose(m, [[0.2, 0.025], [0.025, 0.2]])

    def test_p_equals_q_is_rank_one(self):
        pi = make_pi(6, 2, "unif01", seed=3)
        params = DcSbmParams(n=6, num_classes=2, p=0.5, q=0.5, pi=pi)
        m = population_adjacency(params).adjacency
        np.testing.assert_allclose(m, 0.5 * np.outer(pi, pi), atol=1e-15)
        assert np.linalg.matrix_rank(m, tol=1e-12) == 1

    def test_uniform_row_sums(self):
        # row sums of M are pi_i (p+q)/2 = (p+q)/(2n) for uniform pi
        n = 1000
        m = population_adjacency(uniform_model(n)).adjacency
        np.testing.assert_allclose(m.sum(axis=1), np.full(n, 0.9 / (2 * n)), rtol=1e-12)

    def test_rank_two_decomposition(self):
        # M = (p+q)/2 pi pi^T + (p-q)/2 pihat pihat^T for two classes
        params = unif01_model(80, seed=1)
        m = population_adjacency(params).adjacency
        pihat = params.pi * np.where(params.labels == 0, -1.0, 1.0)
        recon = 0.45 * np.outer(params.pi, params.pi) + 0.35 * np.outer(pihat, pihat)
        assert np.abs(m - recon).max() < 1e-12


class TestSampleGraph:
    def test_zero_probability_graph_is_empty(self):
        params = DcSbmParams(n=10, num_classes=2, p=0.0, q=0.0,
                             pi=np.full(10, 0.1))
        for seed in (0, 1, 2):
            assert sample_graph(params, seed).adjacency.sum() == 0

    def test_binary_symmetric_zero_diagonal(self):
        params = unif01_model(60, seed=2)
        g = sample_graph(params, seed=7, pi_scale=30.0)
        a = g.adjacency
        assert set(np.unique(a)) <= {0.0, 1.0}
        assert np.all(np.diag(a) == 0)
        np.testing.assert_array_equal(a, a.T)

    def test_deterministic_per_seed(self):
        params = unif01_model(40, seed=5)
        a1 = sample_graph(params, seed=11, pi_scale=20.0).adjacency
        a2 = sample_graph(params, seed=11, pi_scale=20.0).adjacency
        a3 = sample_graph(params, seed=12, pi_scale=20.0).adjacency
        np.testing.assert_array_equal(a1, a2)
        assert not np.array_equal(a1, a3)

    def test_scale_overflow_rejected(self):
        params = unif01_model(20, seed=0)
        with pytest.raises(ParameterError):
            sample_graph(params, seed=0, pi_scale=1e6)

    def test_in_class_edge_frequency(self):
        # empirical in-class edge frequency within 3 standard errors of the
        # block-averaged probability, pooled over 10 seeds
        n = 2000
        params = uniform_model(n)
        prob = 0.8 / n**2
        block = np.arange(n // 2)
        pairs_per_seed = len(block) * (len(block) - 1) // 2
        hits = 0
        for seed in range(10):
            a = sample_graph(params, seed).adjacency
            hits += np.triu(a[np.ix_(block, block)], k=1).sum()
        total = 10 * pairs_per_seed
        se = np.sqrt(prob * (1 - prob) / total)
        assert abs(hits / total - prob) <= 3 * se

    def test_scaled_frequency_matches_probability(self):
        n = 400
        params = uniform_model(n, p=0.8, q=0.1)
        scale = n / 2  # probabilities p/4, q/4
        freqs = []
        for seed in range(5):
            a = sample_graph(params, seed, pi_scale=scale).adjacency
            block = a[: n // 2, : n // 2]
            freqs.append(np.triu(block, 1).sum() / (n // 2 * (n // 2 - 1) / 2))
        prob = 0.8 / 4
        se = np.sqrt(prob * (1 - prob) / (5 * n // 2 * (n // 2 - 1) / 2))
        assert abs(np.mean(freqs) - prob) <= 4 * se


class TestMakePi:
    def test_uniform_exact(self):
        pi = make_pi(4, 2, "uniform")
        np.testing.assert_array_equal(pi, [0.25, 0.25, 0.25, 0.25])
        assert pi[:2].sum() == 0.5  # per-class sum is exactly 1/K

    def test_unif01_class_sums(self):
        pi = make_pi(1000, 2, "unif01", seed=9)
        labels = block_labels(1000, 2)
        for c in (0, 1):
            assert abs(pi[labels == c].sum() - 0.5) < 1e-12
        assert pi.min() >= 0 and pi.max() <= 1

    def test_balanced_gamma_equalizes_squares(self):
        pi = make_pi(100, 2, "balanced_gamma", seed=4)
        labels = block_labels(100, 2)
        sq = [np.sum(pi[labels == c] ** 2) for c in (0, 1)]
        assert abs(sq[0] - sq[1]) < 1e-10
        for c in (0, 1):
            assert abs(pi[labels == c].sum() - 0.5) < 1e-12

    def test_indivisible_n_rejected(self):
        with pytest.raises(ParameterError):
            make_pi(5, 2, "uniform")

    def test_unknown_mode_rejected(self):
        with pytest.raises(ParameterError):
            make_pi(4, 2, "zipf")


class TestGraphHelpers:
    def test_asymmetric_adjacency_rejected(self):
        a = np.array([[0.0, 1.0], [0.5, 0.0]])
        with pytest.raises(ParameterError):
            Graph(a)

    def test_remove_isolated(self):
        a = np.zeros((4, 4))
        a[0, 1] = a[1, 0] = 1.0
        g, kept = remove_isolated(Graph(a, labels=np.array([0, 1, 0, 1])))
        np.testing.assert_array_equal(kept, [0, 1])
        assert g.n == 2
        np.testing.assert_array_equal(g.labels, [0, 1])
