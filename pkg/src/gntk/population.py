"""Closed-form population kernels over the degree-corrected block model.

With the weighted population adjacency in place of a sampled graph, the
power Grams S^k S^kT of every convolution have exact per-pair values
that are short exponential sums in k:

    sym   sqrt(pi_i pi_j) (1 + delta * r^2k)
    row   block constants in the per-class sums of pi^2
            class-0 pair:  (lam+mu)(1+r^2k) + 2(lam-mu) r^k
            class-1 pair:  (lam+mu)(1+r^2k) - 2(lam-mu) r^k
            cross pair:    (lam+mu)(1-r^2k)
    col   n pi_i pi_j (1 + delta * r^2k)
    adj   (pi_i pi_j / 2 gamma) ((gamma (p+q)/n)^2k +- (gamma (p-q)/n)^2k)

with r = (p-q)/(p+q) and delta = +1 for same-class pairs, -1 across.
For K > 2 classes the sym Gram generalizes to
sqrt(pi_i pi_j) (1 + m * r_K^2k) with r_K = (p-q)/(p+(K-1)q) and
m = K-1 for same-class pairs, -1 across (eigendecomposition of the
class-level operator; the factor is validated against exact matrix
powers).

Every finite-depth kernel value is then

    theta(d) = sum_{k=1}^{d+1} G(k) * G(1)^(d+1-k)

evaluated here through geometric closed forms with an explicit
equal-ratio branch, and at infinite depth only the constant term of
G survives:  theta(inf) = c1 / (1 - G(1)).

The skip limits reuse the same decomposition.  For the pre-convolution
skip, theta(inf) = (c1 + G(1)) / (1 - G(1)).  For the alpha skip with
b = (1-alpha)^2,

    theta(inf) = alpha^2 / (1 - G(1)) * sum_t c_t * b*rho_t / (1 - b*rho_t),

the infinite-depth limit of the explicit power expansion (the l = 0
term of the inner sum is the identity matrix, which contributes nothing
off the diagonal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conv import check_conv_kind
from .errors import DivergenceError, ParameterError
from .ntk import KernelMatrix, KernelMeta, NtkConfig
from .validation import check_labels

RATIO_EQUAL_RTOL = 1e-14


@dataclass(frozen=True)
class PopulationParams:
    """One queried node pair under the population model.

    pi_i / pi_j feed the sym, col and adj forms; the row form depends
    only on the class-wise sums lam and mu (gamma when balanced).  For
    same-class pairs `class_index` says which class the pair lives in
    (it matters for row when lam != mu).
    """

    p: float
    q: float
    n: int
    num_classes: int = 2
    pi_i: float | None = None
    pi_j: float | None = None
    gamma: float | None = None
    lam: float | None = None
    mu: float | None = None
    same_class: bool = True
    class_index: int = 0

    def __post_init__(self):
        if not (0.0 <= self.q <= self.p <= 1.0):
            raise ParameterError(f"need 0 <= q <= p <= 1, got p={self.p}, q={self.q}")
        if self.n <= 0:
            raise ParameterError("n must be positive")
        if self.num_classes < 2:
            raise ParameterError("K must be at least 2")
        for name in ("pi_i", "pi_j", "gamma", "lam", "mu"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ParameterError(f"{name} must be nonnegative")
        if (self.lam is None) != (self.mu is None):
            raise ParameterError("lam and mu must be given together")
        if self.lam is not None and self.gamma is not None:
            if abs(self.lam + self.mu - 2 * self.gamma) > 1e-12:
                raise ParameterError("inconsistent gamma vs lam+mu")
        if self.class_index not in (0, 1):
            raise ParameterError("class_index must be 0 or 1")

    @property
    def r(self) -> float:
        if self.p + self.q == 0.0:
            return 0.0
        return (self.p - self.q) / (self.p + self.q)

    @property
    def delta(self) -> int:
        return 1 if self.same_class else -1

    def lam_mu(self) -> tuple[float, float]:
        if self.lam is not None:
            return float(self.lam), float(self.mu)
        if self.gamma is None:
            raise ParameterError("row/adj forms need lam+mu or gamma")
        return float(self.gamma), float(self.gamma)

    def gamma_value(self) -> float:
        if self.gamma is not None:
            return float(self.gamma)
        lam, mu = self.lam_mu()
        if abs(lam - mu) > 1e-12:
            raise ParameterError("adj closed form requires balanced pi^2 sums")
        return 0.5 * (lam + mu)

    @staticmethod
    def from_pair(pi: np.ndarray, labels: np.ndarray, i: int, j: int, p: float, q: float) -> "PopulationParams":
        """Parameters describing nodes (i, j) of a concrete model."""
        pi = np.asarray(pi, dtype=float)
        labels = check_labels(labels, pi.shape[0])
        num_classes = int(labels.max()) + 1
        sums = np.zeros(num_classes)
        np.add.at(sums, labels, pi**2)
        lam = float(sums[0])
        mu = float(sums[1]) if num_classes > 1 else 0.0
        balanced = sums.max() - sums.min() < 1e-12
        return PopulationParams(
            p=p, q=q, n=pi.shape[0], num_classes=num_classes,
            pi_i=float(pi[i]), pi_j=float(pi[j]),
            gamma=float(sums.mean()) if balanced else None,
            lam=lam, mu=mu,
            same_class=bool(labels[i] == labels[j]),
            class_index=int(labels[i]) if labels[i] == labels[j] and labels[i] < 2 else 0,
        )


# --- per-kind exponential decompositions: G(k) = sum_t c_t * rho_t^k ----


def _sym_terms(pi_i: float, pi_j: float, p: float, q: float, num_classes: int,
               same_class: bool) -> list[tuple[float, float]]:
    nu = math.sqrt(pi_i * pi_j)
    r_k = (p - q) / (p + (num_classes - 1) * q)
    m = (num_classes - 1) if same_class else -1
    return [(nu, 1.0), (m * nu, r_k * r_k)]


def _row_terms(lam: float, mu: float, r: float, same_class: bool,
               class_index: int) -> list[tuple[float, float]]:
    # depends on the pair only through (lam, mu) and the block
    if not same_class:
        return [(lam + mu, 1.0), (-(lam + mu), r * r)]
    sign = 1.0 if class_index == 0 else -1.0
    return [(lam + mu, 1.0), (2.0 * sign * (lam - mu), r), (lam + mu, r * r)]


def _col_terms(n: int, pi_i: float, pi_j: float, r: float,
               same_class: bool) -> list[tuple[float, float]]:
    base = n * pi_i * pi_j
    delta = 1.0 if same_class else -1.0
    return [(base, 1.0), (delta * base, r * r)]


def _adj_terms(n: int, pi_i: float, pi_j: float, gamma: float, p: float, q: float,
               same_class: bool) -> list[tuple[float, float]]:
    coef = pi_i * pi_j / (2.0 * gamma)
    rho_plus = (gamma * (p + q) / n) ** 2
    rho_minus = (gamma * (p - q) / n) ** 2
    sign = 1.0 if same_class else -1.0
    return [(coef, rho_plus), (sign * coef, rho_minus)]


def _decompose(params: PopulationParams, kind: str) -> list[tuple[float, float]]:
    check_conv_kind(kind)
    if kind != "sym" and params.num_classes != 2:
        raise ParameterError(f"closed form for kind={kind!r} is stated for K=2 only")
    if kind == "sym":
        if params.pi_i is None or params.pi_j is None:
            raise ParameterError("sym form needs pi_i and pi_j")
        return _sym_terms(params.pi_i, params.pi_j, params.p, params.q,
                          params.num_classes, params.same_class)
    if kind == "row":
        lam, mu = params.lam_mu()
        return _row_terms(lam, mu, params.r, params.same_class, params.class_index)
    if kind == "col":
        if params.pi_i is None or params.pi_j is None:
            raise ParameterError("col form needs pi_i and pi_j")
        return _col_terms(params.n, params.pi_i, params.pi_j, params.r, params.same_class)
    if params.pi_i is None or params.pi_j is None:
        raise ParameterError("adj form needs pi_i and pi_j")
    return _adj_terms(params.n, params.pi_i, params.pi_j, params.gamma_value(),
                      params.p, params.q, params.same_class)


def geometric_power_sum(a: float, b: float, m: int) -> float:
    """sum_{k=1}^{m} a^k b^(m-k).

    Equal ratios take the exact m * a^m branch instead of the 0/0
    closed fraction; otherwise the geometric form is evaluated with the
    contracting ratio for stability.
    """
    if m < 1:
        return 0.0
    if a == 0.0:
        return 0.0
    if b == 0.0:
        return a**m
    if abs(a - b) <= RATIO_EQUAL_RTOL * max(abs(a), abs(b)):
        return m * a**m
    if abs(a) < abs(b):
        rho = a / b
        return b**m * rho * (1.0 - rho**m) / (1.0 - rho)
    rho = b / a
    return a**m * (1.0 - rho**m) / (1.0 - rho)


def pop_gram(params: PopulationParams, kind: str, k: int) -> float:
    """(S^k S^kT)_ij for the population operator of the given kind."""
    if k < 1:
        raise ParameterError("power k must be >= 1")
    return float(sum(c * rho**k for c, rho in _decompose(params, kind)))


def pop_ntk_depth(params: PopulationParams, kind: str, depth: int) -> float:
    """Finite-depth population kernel value for the pair."""
    if depth < 1:
        raise ParameterError("depth must be >= 1")
    terms = _decompose(params, kind)
    base = sum(c * rho for c, rho in terms)  # G(1), the Hadamard factor
    return float(sum(c * geometric_power_sum(rho, base, depth + 1) for c, rho in terms))


def _limit_base(terms: list[tuple[float, float]]) -> float:
    base = sum(c * rho for c, rho in terms)
    if base >= 1.0:
        raise DivergenceError(f"geometric base {base:.6f} >= 1; no infinite-depth limit")
    return base


def pop_ntk_limit(params: PopulationParams, kind: str) -> float:
    """Infinite-depth population kernel value (0 for the scaled adjacency)."""
    terms = _decompose(params, kind)
    base = _limit_base(terms)
    constant = sum(c for c, rho in terms if rho == 1.0)
    return float(constant / (1.0 - base))


def pop_skip_limit(params: PopulationParams, kind: str, variant: str,
                   alpha: float | None = None) -> float:
    """Infinite-depth population kernel with a skip connection.

    Only the degree-normalized kinds analysed with skips are supported
    (sym and row).  The alpha limit is the depth limit of the explicit
    power expansion; at p = q it carries no class information, as it
    must.
    """
    check_conv_kind(kind)
    if kind not in ("sym", "row"):
        raise ParameterError("skip limits are stated for kind in {'sym', 'row'}")
    if variant not in ("pc", "alpha"):
        raise ParameterError("variant must be 'pc' or 'alpha'")
    terms = _decompose(params, kind)
    base = _limit_base(terms)
    if variant == "pc":
        if alpha is not None:
            raise ParameterError("alpha is only valid with variant='alpha'")
        constant = sum(c for c, rho in terms if rho == 1.0)
        return float((constant + base) / (1.0 - base))
    if alpha is None or not (0.0 < alpha < 1.0):
        raise ParameterError("variant='alpha' requires alpha in (0, 1)")
    b = (1.0 - alpha) ** 2
    inner = sum(c * (b * rho) / (1.0 - b * rho) for c, rho in terms)
    return float(alpha * alpha * inner / (1.0 - base))


# --- vectorized evaluation over a whole model ---------------------------


def _gram_matrices(pi: np.ndarray, labels: np.ndarray, p: float, q: float,
                   kind: str, powers: list[int]) -> list[np.ndarray]:
    """Population Gram matrices (S^k S^kT) for each k in `powers`."""
    check_conv_kind(kind)
    pi = np.asarray(pi, dtype=float)
    labels = check_labels(labels, pi.shape[0])
    num_classes = int(labels.max()) + 1
    n = pi.shape[0]
    same = labels[:, None] == labels[None, :]
    r = (p - q) / (p + q)
    if kind == "sym":
        nu = np.sqrt(np.outer(pi, pi))
        r_k = (p - q) / (p + (num_classes - 1) * q)
        m = np.where(same, float(num_classes - 1), -1.0)
        return [nu * (1.0 + m * r_k ** (2 * k)) for k in powers]
    if num_classes != 2:
        raise ParameterError(f"closed form for kind={kind!r} is stated for K=2 only")
    if kind == "col":
        base = n * np.outer(pi, pi)
        delta = np.where(same, 1.0, -1.0)
        return [base * (1.0 + delta * r ** (2 * k)) for k in powers]
    sums = np.zeros(num_classes)
    np.add.at(sums, labels, pi**2)
    lam, mu = float(sums[0]), float(sums[1])
    if kind == "row":
        out = []
        zero = labels == 0
        c0 = zero[:, None] & zero[None, :]  # both endpoints in class 0
        for k in powers:
            vals = np.where(
                same,
                (lam + mu) * (1.0 + r ** (2 * k))
                + np.where(c0, 2.0, -2.0) * (lam - mu) * r**k,
                (lam + mu) * (1.0 - r ** (2 * k)),
            )
            out.append(vals)
        return out
    # adj: requires balanced per-class pi^2 sums
    if abs(lam - mu) > 1e-12:
        raise ParameterError("adj closed form requires balanced pi^2 sums")
    gamma = 0.5 * (lam + mu)
    coef = np.outer(pi, pi) / (2.0 * gamma)
    sign = np.where(same, 1.0, -1.0)
    rp = (gamma * (p + q) / n) ** 2
    rm = (gamma * (p - q) / n) ** 2
    return [coef * (rp**k + sign * rm**k) for k in powers]


def population_ntk_matrix(pi: np.ndarray, labels: np.ndarray, p: float, q: float,
                          kind: str, depth: int) -> KernelMatrix:
    """Full n x n population kernel from the closed forms (linear,
    orthonormal features), by direct Hadamard-power summation."""
    if depth < 1:
        raise ParameterError("depth must be >= 1")
    grams = _gram_matrices(pi, labels, p, q, kind, list(range(1, depth + 2)))
    base = grams[0]
    theta = grams[depth].copy()
    hadamard = np.ones_like(base)
    for k in range(depth, 0, -1):
        hadamard = hadamard * base
        theta = theta + grams[k - 1] * hadamard
    cfg = NtkConfig(depth=depth, activation="linear")
    return KernelMatrix(theta, KernelMeta.from_config(cfg, "population", kind))
