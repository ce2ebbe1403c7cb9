"""Infinite-width graph NTK computation.

The kernel of a depth-d GCN with diffusion operator S is assembled from
per-layer covariances as

    Theta^(d) = sum_{k=1}^{d+1} Sigma_k (.) (S S^T)^{(.)(d+1-k)}
                (.) Edot_k (.) Edot_{k+1} (.) ... (.) Edot_d

where (.) is the Hadamard product, Sigma_1 = S X X^T S^T and
Sigma_k = S E_{k-1} S^T, with E and Edot the Gaussian activation
moments of the previous layer's covariance.  Skip variants change only
the Sigma recursion:

    pre-convolution skip:  Sigma_k = S E_{k-1} S^T + Sigma_1,
                           Sigma_1 = S Etilde_0 S^T
    alpha interpolation:   Sigma_k = (1-a)^2 S E_{k-1} S^T + a^2 Etilde_0
                           (plus cross terms at k=1)

Etilde_0 applies the skip activation's moments to X X^T, scaled by the
main activation's normalization constant.

Passing ``x=None`` to the kernel functions selects the orthonormal
feature regime X X^T = I.

The module also provides the linear orthonormal closed forms (matrix
powers instead of the moment recursion) and a Monte-Carlo validator
that measures the layer covariances of random finite-width networks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .seeding import spawn_streams
from .validation import check_square

ACTIVATIONS = ("linear", "relu")
SKIP_VARIANTS = ("none", "pc", "alpha")

_C_SIGMA = {"linear": 1.0, "relu": 2.0}
_ZERO_VAR_ATOL = 1e-12


@dataclass(frozen=True)
class NtkConfig:
    """Kernel configuration: depth, activations and skip variant.

    depth counts diffusion applications before the output layer; d=1 is
    the minimum.  alpha must be given iff skip == "alpha".
    """

    depth: int = 1
    activation: str = "linear"
    skip: str = "none"
    alpha: float | None = None
    skip_activation: str = "linear"

    def __post_init__(self):
        if int(self.depth) != self.depth or self.depth < 1:
            raise ParameterError(f"depth must be an integer >= 1, got {self.depth}")
        object.__setattr__(self, "depth", int(self.depth))
        if self.activation not in ACTIVATIONS:
            raise ParameterError(f"activation must be one of {ACTIVATIONS}")
        if self.skip_activation not in ACTIVATIONS:
            raise ParameterError(f"skip_activation must be one of {ACTIVATIONS}")
        if self.skip not in SKIP_VARIANTS:
            raise ParameterError(f"skip must be one of {SKIP_VARIANTS}")
        if self.skip == "alpha":
            if self.alpha is None or not (0.0 < self.alpha < 1.0):
                raise ParameterError("skip='alpha' requires alpha in (0, 1)")
        elif self.alpha is not None:
            raise ParameterError("alpha is only valid with skip='alpha'")

    @property
    def c_sigma(self) -> float:
        """Normalization 1/E[sigma(u)^2] for u ~ N(0,1): 1 linear, 2 relu."""
        return _C_SIGMA[self.activation]


@dataclass(frozen=True)
class KernelMeta:
    conv: str | None
    depth: int
    activation: str
    skip: str
    alpha: float | None
    skip_activation: str | None
    source: str  # exact | closed | population | empirical

    @staticmethod
    def from_config(cfg: NtkConfig, source: str, conv: str | None = None) -> "KernelMeta":
        return KernelMeta(
            conv=conv,
            depth=cfg.depth,
            activation=cfg.activation,
            skip=cfg.skip,
            alpha=cfg.alpha,
            skip_activation=cfg.skip_activation if cfg.skip != "none" else None,
            source=source,
        )


@dataclass(frozen=True)
class KernelMatrix:
    """An n x n kernel with provenance metadata.

    Construction asserts symmetry (within 1e-10, scaled by the largest
    entry magnitude).  PSD is checked on demand via `min_eigenvalue`,
    with the tolerance -1e-8 * trace / n used throughout the tests.
    """

    values: np.ndarray
    meta: KernelMeta

    def __post_init__(self):
        vals = check_square(self.values, "kernel")
        scale = max(1.0, float(np.abs(vals).max(initial=0.0)))
        asym = float(np.abs(vals - vals.T).max(initial=0.0))
        if asym > 1e-10 * scale:
            raise ParameterError(f"kernel asymmetry {asym:.3e} exceeds tolerance")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def min_eigenvalue(self) -> float:
        sym = 0.5 * (self.values + self.values.T)
        return float(np.linalg.eigvalsh(sym)[0])

    def psd_bound(self) -> float:
        """The kernel passes the PSD check when min eig >= -psd_bound."""
        return 1e-8 * float(np.trace(self.values)) / self.n

    def is_psd(self) -> bool:
        return self.min_eigenvalue() >= -self.psd_bound()


def activation_moments(sigma_matrix: np.ndarray, activation: str) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian moments (E, Edot) of a covariance under an activation.

    E = c_sigma * E[sigma(F) sigma(F)^T], Edot likewise for the
    derivative, with F ~ N(0, Sigma).  Linear returns (Sigma, ones).
    ReLU uses the arc-cosine closed forms with c_sigma = 2, which keep
    the diagonal of E equal to the diagonal of Sigma.  Rows/columns with
    zero variance get E = 0 and Edot = 1/2 (symmetric subgradient at 0).
    """
    if activation not in ACTIVATIONS:
        raise ParameterError(f"activation must be one of {ACTIVATIONS}")
    sig = check_square(sigma_matrix, "covariance")
    scale = max(1.0, float(np.abs(sig).max(initial=0.0)))
    if np.abs(sig - sig.T).max(initial=0.0) > 1e-10 * scale:
        raise ParameterError("covariance must be symmetric")
    if activation == "linear":
        return sig.copy(), np.ones_like(sig)

    diag = np.diag(sig).copy()
    if diag.min(initial=0.0) < -_ZERO_VAR_ATOL:
        raise ParameterError(f"covariance diagonal has negative entry {diag.min():.3e}")
    diag = np.maximum(diag, 0.0)
    norms = np.sqrt(np.outer(diag, diag))
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(norms > 0.0, sig / norms, 0.0)
    # clamp drift past +-1; values within 1e-12 of the ends are exact
    corr = np.clip(corr, -1.0, 1.0)
    theta = np.arccos(corr)
    e_mat = (norms / np.pi) * (np.sin(theta) + (np.pi - theta) * np.cos(theta))
    e_dot = (np.pi - theta) / np.pi
    degenerate = (diag[:, None] <= _ZERO_VAR_ATOL) | (diag[None, :] <= _ZERO_VAR_ATOL)
    e_mat[degenerate] = 0.0
    e_dot[degenerate] = 0.5
    return e_mat, e_dot


def _skip_input_moment(sigma0: np.ndarray, cfg: NtkConfig) -> np.ndarray:
    """Etilde_0: skip-activation moments of X X^T, scaled by c_sigma.

    The scale is the main activation's constant (it enters through the
    layer normalization), so a linear skip under a linear network maps
    orthonormal features to the identity.
    """
    raw, _ = activation_moments(sigma0, cfg.skip_activation)
    return (cfg.c_sigma / _C_SIGMA[cfg.skip_activation]) * raw


def _layer_covariances(S: np.ndarray, x: np.ndarray | None, cfg: NtkConfig) -> list[np.ndarray]:
    """Sigma_1 .. Sigma_{d+1} for the configured architecture."""
    n = S.shape[0]
    d = cfg.depth
    if x is None:
        sigma0 = np.eye(n)
        s_xxt_st = S @ S.T
    else:
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[0] != n:
            raise ParameterError(f"features must be n x f with n={n}, got {x.shape}")
        sigma0 = x @ x.T
        s_xxt_st = S @ sigma0 @ S.T

    sigmas: list[np.ndarray] = []
    if cfg.skip == "none":
        cur = s_xxt_st
        sigmas.append(cur)
        for _ in range(2, d + 2):
            e_mat, _ = activation_moments(cur, cfg.activation)
            cur = S @ e_mat @ S.T
            sigmas.append(cur)
    elif cfg.skip == "pc":
        te0 = _skip_input_moment(sigma0, cfg)
        first = S @ te0 @ S.T
        sigmas.append(first)
        cur = first
        for _ in range(2, d + 2):
            e_mat, _ = activation_moments(cur, cfg.activation)
            cur = S @ e_mat @ S.T + first
            sigmas.append(cur)
    else:  # alpha
        a = cfg.alpha
        te0 = _skip_input_moment(sigma0, cfg)
        s_te0 = S @ te0
        cur = (1 - a) ** 2 * (s_te0 @ S.T) + a * (1 - a) * (s_te0 + s_te0.T) + a * a * te0
        sigmas.append(cur)
        for _ in range(2, d + 2):
            e_mat, _ = activation_moments(cur, cfg.activation)
            cur = (1 - a) ** 2 * (S @ e_mat @ S.T) + a * a * te0
            sigmas.append(cur)
    return sigmas


def _assemble(sigmas: Sequence[np.ndarray], edots: Sequence[np.ndarray], s_st: np.ndarray) -> np.ndarray:
    """Hadamard-sum the layer terms; edots[k-1] belongs to layer k."""
    d = len(sigmas) - 1
    theta = sigmas[d].copy()
    prod = np.ones_like(s_st)
    for k in range(d, 0, -1):
        prod = prod * s_st * edots[k - 1]
        theta = theta + sigmas[k - 1] * prod
    return theta


def ntk_exact(S, x: np.ndarray | None, cfg: NtkConfig, conv: str | None = None) -> KernelMatrix:
    """Exact infinite-width kernel for any configuration."""
    S = check_square(np.asarray(S, dtype=float), "S")
    sigmas = _layer_covariances(S, x, cfg)
    edots = [activation_moments(sigmas[k], cfg.activation)[1] for k in range(cfg.depth)]
    theta = _assemble(sigmas, edots, S @ S.T)
    return KernelMatrix(theta, KernelMeta.from_config(cfg, "exact", conv))


def ntk_vanilla(S, x: np.ndarray | None, cfg: NtkConfig, conv: str | None = None) -> KernelMatrix:
    if cfg.skip != "none":
        raise ParameterError("ntk_vanilla requires skip='none'")
    return ntk_exact(S, x, cfg, conv)


def ntk_skip_pc(S, x: np.ndarray | None, cfg: NtkConfig, conv: str | None = None) -> KernelMatrix:
    if cfg.skip != "pc":
        raise ParameterError("ntk_skip_pc requires skip='pc'")
    return ntk_exact(S, x, cfg, conv)


def ntk_skip_alpha(S, x: np.ndarray | None, cfg: NtkConfig, conv: str | None = None) -> KernelMatrix:
    if cfg.skip != "alpha":
        raise ParameterError("ntk_skip_alpha requires skip='alpha'")
    return ntk_exact(S, x, cfg, conv)


# ---------------------------------------------------------------------------
# Linear orthonormal-feature closed forms (matrix-power path)
# ---------------------------------------------------------------------------


def linear_gram_sequence(S, max_k: int, with_cross: bool = False) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Power Grams P_k = S^k S^kT for k = 1..max_k (and R_k = S^k S^(k-1)T).

    For symmetric S the sequence reduces to even powers of S, halving
    the matrix products; the generic path multiplies incrementally.
    The cross Grams R_k feed the alpha-skip closed form, where the
    middle term is R_k + R_k^T.
    """
    S = check_square(np.asarray(S, dtype=float), "S")
    powers: list[np.ndarray] = []
    crosses: list[np.ndarray] = []
    scale = max(1.0, float(np.abs(S).max(initial=0.0)))
    if np.abs(S - S.T).max(initial=0.0) <= 1e-13 * scale:
        cur = S.copy()  # S^(2k-1)
        for k in range(1, max_k + 1):
            if with_cross:
                crosses.append(cur.copy())
            cur = cur @ S  # S^(2k)
            powers.append(cur.copy())
            if k < max_k:
                cur = cur @ S  # S^(2k+1)
        return powers, crosses
    prev = np.eye(S.shape[0])
    cur = S.copy()
    for k in range(1, max_k + 1):
        powers.append(cur @ cur.T)
        if with_cross:
            crosses.append(cur @ prev.T)
        if k < max_k:
            prev = cur
            cur = cur @ S
    return powers, crosses


def ntk_linear_closed(S, depth: int, conv: str | None = None,
                      grams: Sequence[np.ndarray] | None = None) -> KernelMatrix:
    """Linear orthonormal kernel: sum_k S^k S^kT (.) (S S^T)^{(.)(d+1-k)}."""
    S = check_square(np.asarray(S, dtype=float), "S")
    cfg = NtkConfig(depth=depth, activation="linear")
    powers = list(grams) if grams is not None else linear_gram_sequence(S, depth + 1)[0]
    if len(powers) < depth + 1:
        raise ParameterError("grams must cover k = 1..depth+1")
    theta = _assemble(powers[: depth + 1], [np.ones_like(S)] * depth, powers[0])
    return KernelMatrix(theta, KernelMeta.from_config(cfg, "closed", conv))


def ntk_skip_linear_closed(S, depth: int, variant: str, alpha: float | None = None,
                           conv: str | None = None,
                           grams: tuple[Sequence[np.ndarray], Sequence[np.ndarray]] | None = None,
                           ) -> KernelMatrix:
    """Linear orthonormal skip kernels from the explicit power expansion.

    pre-convolution:  Sigma_k = S^k S^kT + S S^T
    alpha:            Sigma_k = (1-a)^2k S^k S^kT
                              + a (1-a)^(2k-1) S^(k-1) (S + S^T) S^(k-1)T
                              + a^2 sum_{l=0}^{k-1} (1-a)^2l S^l S^lT

    Both expansions start at k = 1.  For the alpha variant this path is
    identical to the moment recursion with linear activations.  For the
    pre-convolution variant it is not: the expansion doubles the k = 1
    covariance (2 S S^T), so at depth 1 it exceeds the recursion by
    exactly (S S^T)^{(.)2}, and at greater depths the recursion
    additionally accumulates the lower-order power Grams.  The
    infinite-depth population limits are the limits of this expansion.
    """
    S = check_square(np.asarray(S, dtype=float), "S")
    if variant not in ("pc", "alpha"):
        raise ParameterError("variant must be 'pc' or 'alpha'")
    if variant == "pc":
        cfg = NtkConfig(depth=depth, activation="linear", skip="pc")
    else:
        cfg = NtkConfig(depth=depth, activation="linear", skip="alpha", alpha=alpha)
    need_cross = variant == "alpha"
    if grams is not None:
        powers, crosses = grams
        powers = list(powers)
        crosses = list(crosses)
    else:
        powers, crosses = linear_gram_sequence(S, depth + 1, with_cross=need_cross)
    if len(powers) < depth + 1 or (need_cross and len(crosses) < depth + 1):
        raise ParameterError("grams must cover k = 1..depth+1")

    # assemble descending in k with running Hadamard powers; the alpha
    # cumulative term is peeled off incrementally to avoid holding all
    # d+1 covariance matrices at once
    n = S.shape[0]
    sst = powers[0]
    theta = np.zeros((n, n))
    hadamard = np.ones((n, n))
    if variant == "pc":
        for k in range(depth + 1, 0, -1):
            theta += (powers[k - 1] + sst) * hadamard
            hadamard = hadamard * sst
    else:
        a = cfg.alpha
        cum = np.eye(n)  # sum_{l=0}^{k-1} (1-a)^2l P_l, P_0 = I
        for l in range(1, depth + 1):
            cum += (1 - a) ** (2 * l) * powers[l - 1]
        for k in range(depth + 1, 0, -1):
            sig = ((1 - a) ** (2 * k) * powers[k - 1]
                   + a * (1 - a) ** (2 * k - 1) * (crosses[k - 1] + crosses[k - 1].T)
                   + a * a * cum)
            theta += sig * hadamard
            hadamard = hadamard * sst
            if k >= 2:
                cum -= (1 - a) ** (2 * (k - 1)) * powers[k - 2]
    return KernelMatrix(theta, KernelMeta.from_config(cfg, "closed", conv))


# ---------------------------------------------------------------------------
# Monte-Carlo validator
# ---------------------------------------------------------------------------


def _act_fns(name: str):
    if name == "linear":
        return (lambda z: z), (lambda z: np.ones_like(z))
    return (lambda z: np.maximum(z, 0.0)), (lambda z: np.heaviside(z, 0.5))


def empirical_ntk(S, x: np.ndarray | None, cfg: NtkConfig, width: int, num_samples: int,
                  seed: int, conv: str | None = None) -> KernelMatrix:
    """Monte-Carlo estimate of the kernel from random finite networks.

    For each of `num_samples` i.i.d. standard-normal weight draws the
    finite network (scalar output head) is run forward; the measured
    per-layer feature Grams G_k G_k^T and derivative Grams
    (c_sigma/h) sigmad(F_k) sigmad(F_k)^T replace the Gaussian moments
    in the kernel assembly.  The estimate converges to the exact kernel
    as width and the number of draws grow.

    Draws use independent counter-based streams and may be evaluated in
    parallel (up to GNTK_THREADS workers); the reduction sums them in
    draw order, so the result is identical either way.
    """
    if width < 1 or num_samples < 1:
        raise ParameterError("width and num_samples must be >= 1")
    S = check_square(np.asarray(S, dtype=float), "S")
    n = S.shape[0]
    feats = np.eye(n) if x is None else np.asarray(x, dtype=float)
    if feats.ndim != 2 or feats.shape[0] != n:
        raise ParameterError("features must be n x f")
    f_in = feats.shape[1]
    d = cfg.depth
    c_main = cfg.c_sigma
    act, act_dot = _act_fns(cfg.activation)
    skip_act, _ = _act_fns(cfg.skip_activation)
    root = np.sqrt(c_main / width)
    s_st = S @ S.T

    def one_draw(rng: np.random.Generator) -> np.ndarray:
        sig_hats: list[np.ndarray] = []
        edot_hats: list[np.ndarray] = []
        h0 = None
        if cfg.skip == "none":
            g_mat = S @ feats
            f_mat = g_mat @ rng.standard_normal((f_in, width))
        else:
            h0 = skip_act(feats @ rng.standard_normal((f_in, width)))
            if cfg.skip == "pc":
                g_mat = root * (S @ h0)
            else:
                a = cfg.alpha
                g_mat = root * ((1 - a) * (S @ h0) + a * h0)
            f_mat = g_mat @ rng.standard_normal((width, width))
        sig_hats.append(g_mat @ g_mat.T)
        for layer in range(2, d + 2):
            h_out = 1 if layer == d + 1 else width
            der = act_dot(f_mat)
            edot_hats.append((c_main / width) * (der @ der.T))
            if cfg.skip == "none":
                g_mat = root * (S @ act(f_mat))
            elif cfg.skip == "pc":
                g_mat = root * (S @ (act(f_mat) + h0))
            else:
                a = cfg.alpha
                g_mat = root * ((1 - a) * (S @ act(f_mat)) + a * h0)
            sig_hats.append(g_mat @ g_mat.T)
            f_mat = g_mat @ rng.standard_normal((width, h_out))
        return _assemble(sig_hats, edot_hats, s_st)

    streams = spawn_streams(seed, "weights", num_samples)
    from .analysis import gntk_threads  # local import: analysis imports this module

    workers = min(gntk_threads(), num_samples)
    total = np.zeros((n, n))
    if workers <= 1:
        for rng in streams:
            total += one_draw(rng)
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for draw in pool.map(one_draw, streams):  # map preserves draw order
                total += draw
    theta = total / num_samples
    theta = 0.5 * (theta + theta.T)
    return KernelMatrix(theta, KernelMeta.from_config(cfg, "empirical", conv))
