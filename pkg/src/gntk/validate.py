"""Built-in oracle suites behind the `gntk validate` subcommand.

Each check recomputes a quantity along two independent routes (closed
form vs recursion, closed form vs matrix algebra, analytic moments vs
Monte Carlo, ...) and reports the observed discrepancy against its
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conv import CONV_KINDS, build_convolution
from .dcsbm import DcSbmParams, make_pi, population_adjacency
from .errors import ParameterError
from .ntk import (NtkConfig, activation_moments, empirical_ntk, ntk_exact,
                  ntk_linear_closed, ntk_skip_linear_closed)
from .population import PopulationParams, pop_ntk_depth, pop_ntk_limit
from .seeding import substream

LEVELS = ("linear-oracle", "population-oracle", "moments", "empirical", "all")


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _random_operator(rng, n: int) -> np.ndarray:
    # row-normalized random digraph-ish operator; dense enough to avoid
    # zero rows
    a = rng.uniform(size=(n, n)) + 0.1
    return a / a.sum(axis=1, keepdims=True)


def _linear_oracle(seed: int) -> list[CheckResult]:
    rng = substream(seed, "validate-linear")
    results = []
    for _ in range(2):
        n = int(rng.integers(5, 12))
        S = _random_operator(rng, n)
        sst = S @ S.T
        for d in (1, 2, 4):
            a = ntk_exact(S, None, NtkConfig(depth=d, activation="linear")).values
            b = ntk_linear_closed(S, d).values
            err = np.abs(a - b).max()
            results.append(CheckResult(
                f"vanilla recursion == closed (n={n}, d={d})", err < 1e-9, f"max|diff|={err:.2e}"))
        for d in (1, 2, 3):
            cfg = NtkConfig(depth=d, activation="linear", skip="alpha", alpha=0.3)
            a = ntk_exact(S, None, cfg).values
            b = ntk_skip_linear_closed(S, d, "alpha", alpha=0.3).values
            err = np.abs(a - b).max()
            results.append(CheckResult(
                f"alpha recursion == closed (n={n}, d={d})", err < 1e-9, f"max|diff|={err:.2e}"))
        # pre-convolution skip: the power expansion doubles the k=1 Gram,
        # so at d=1 the two routes differ by exactly (S S^T)^(.)2
        cfg = NtkConfig(depth=1, activation="linear", skip="pc")
        a = ntk_exact(S, None, cfg).values + sst * sst
        b = ntk_skip_linear_closed(S, 1, "pc").values
        err = np.abs(a - b).max()
        results.append(CheckResult(
            f"pc recursion + (SS^T)^2 == closed (n={n}, d=1)", err < 1e-9, f"max|diff|={err:.2e}"))
    return results


def _population_oracle(seed: int) -> list[CheckResult]:
    results = []
    n, p, q = 40, 0.8, 0.1
    for mode in ("uniform", "unif01"):
        pi = make_pi(n, 2, mode, seed=seed)
        params_model = DcSbmParams(n=n, num_classes=2, p=p, q=q, pi=pi)
        graph = population_adjacency(params_model)
        kinds = CONV_KINDS if mode == "uniform" else ("sym", "row", "col")
        for kind in kinds:
            S = build_convolution(graph, kind)
            for d in (1, 3):
                exact = ntk_linear_closed(S, d).values
                worst = 0.0
                for (i, j) in ((0, 1), (0, n - 1), (n - 1, n - 2)):
                    pp = PopulationParams.from_pair(pi, params_model.labels, i, j, p, q)
                    worst = max(worst, abs(pop_ntk_depth(pp, kind, d) - exact[i, j]))
                results.append(CheckResult(
                    f"population closed == matrix recursion ({mode}, {kind}, d={d})",
                    worst < 1e-9, f"max|diff|={worst:.2e}"))
    # limit consistency on a small balanced model
    pi = make_pi(8, 2, "uniform")
    for kind in ("sym", "row", "col"):
        pp = PopulationParams.from_pair(pi, np.repeat([0, 1], 4), 0, 1, p, q)
        diff = abs(pop_ntk_depth(pp, kind, 300) - pop_ntk_limit(pp, kind))
        results.append(CheckResult(
            f"finite depth -> limit ({kind})", diff < 1e-6, f"|theta(300)-theta(inf)|={diff:.2e}"))
    return results


def _moments(seed: int) -> list[CheckResult]:
    rng = substream(seed, "validate-moments")
    results = []
    for trial in range(4):
        a = rng.standard_normal((2, 2))
        sig = a @ a.T + 0.1 * np.eye(2)
        e_mat, e_dot = activation_moments(sig, "relu")
        z = rng.multivariate_normal(np.zeros(2), sig, size=1_000_000)
        relu = np.maximum(z, 0.0)
        der = (z > 0).astype(float)
        mc_e = 2.0 * (relu.T @ relu) / z.shape[0]
        mc_d = 2.0 * (der.T @ der) / z.shape[0]
        err = max(np.abs(mc_e - e_mat).max() / max(1.0, np.abs(e_mat).max()),
                  np.abs(mc_d - e_dot).max())
        results.append(CheckResult(
            f"relu moments vs Monte Carlo (trial {trial})", err < 5e-3, f"max err={err:.2e}"))
    return results


def _empirical(seed: int) -> list[CheckResult]:
    results = []
    n = 4
    eye = np.eye(n)
    cfg = NtkConfig(depth=1, activation="linear")
    est = empirical_ntk(eye, None, cfg, width=2048, num_samples=8, seed=seed).values
    err = np.abs(np.diag(est) - 2.0).max() / 2.0
    results.append(CheckResult("empirical diag == d+1 (S=I, linear, d=1)", err < 0.05,
                               f"rel err={err:.2e}"))
    ring = np.zeros((n, n))
    for i in range(n):
        ring[i, (i + 1) % n] = ring[(i + 1) % n, i] = 1.0
    S = ring / ring.sum(axis=1, keepdims=True)
    cfg = NtkConfig(depth=2, activation="relu")
    exact = ntk_exact(S, None, cfg).values
    est = empirical_ntk(S, None, cfg, width=2048, num_samples=16, seed=seed).values
    rel = np.linalg.norm(est - exact) / np.linalg.norm(exact)
    results.append(CheckResult("empirical vs exact (relu ring, d=2)", rel < 0.10,
                               f"rel frob err={rel:.2e}"))
    return results


def run_checks(level: str, seed: int = 0) -> list[CheckResult]:
    if level not in LEVELS:
        raise ParameterError(f"level must be one of {LEVELS}")
    suites = {
        "linear-oracle": (_linear_oracle,),
        "population-oracle": (_population_oracle,),
        "moments": (_moments,),
        "empirical": (_empirical,),
        "all": (_linear_oracle, _population_oracle, _moments, _empirical),
    }
    results: list[CheckResult] = []
    for suite in suites[level]:
        results.extend(suite(seed))
    return results
