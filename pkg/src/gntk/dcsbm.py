"""Degree-corrected stochastic block model graphs.

The model on ``n`` nodes split into ``K`` classes is parameterized by an
in-class edge probability ``p``, an out-of-class probability ``q`` with
``0 <= q <= p <= 1`` (q < p in the separated regime), and a degree-correction vector ``pi`` normalized to
total sum 1 (sum 1/K inside every class).  The population adjacency is

    M[i, j] = p * pi[i] * pi[j]   if labels match,
              q * pi[i] * pi[j]   otherwise,

including the diagonal (analyzing the weighted graph A = M amounts to
allowing a self-loop with the corresponding probability).  Sampled
graphs are simple: 0/1, symmetric, zero diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, ParameterError
from .seeding import substream
from .validation import check_adjacency, check_labels

PI_SUM_ATOL = 1e-12
PI_MODES = ("uniform", "unif01", "balanced_gamma")


def block_labels(n: int, num_classes: int) -> np.ndarray:
    """Canonical label vector: contiguous blocks of n/K nodes per class."""
    if n % num_classes != 0:
        raise ParameterError(f"n={n} is not divisible by K={num_classes}")
    return np.repeat(np.arange(num_classes), n // num_classes)


@dataclass(frozen=True)
class DcSbmParams:
    """Parameter set defining one DC-SBM law.

    Attributes:
        n: node count.
        num_classes: K >= 2.
        p: in-class edge probability.
        q: out-of-class edge probability, at most p (equality degenerates
           the class structure, r = 0).
        pi: degree corrections, length n, entries in [0, 1], total sum 1.
        labels: class assignment in {0..K-1}; defaults to contiguous blocks.
    """

    n: int
    num_classes: int
    p: float
    q: float
    pi: np.ndarray
    labels: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.n <= 0:
            raise ParameterError("n must be positive")
        if self.num_classes < 2:
            raise ParameterError("K must be at least 2")
        if not (0.0 <= self.q <= self.p <= 1.0):
            raise ParameterError(f"need 0 <= q <= p <= 1, got p={self.p}, q={self.q}")
        pi = np.asarray(self.pi, dtype=float)
        if pi.shape != (self.n,):
            raise ParameterError(f"pi must have length n={self.n}")
        if pi.min() < 0.0 or pi.max() > 1.0:
            raise ParameterError("pi entries must lie in [0, 1]")
        if abs(pi.sum() - 1.0) > PI_SUM_ATOL:
            raise ParameterError(f"pi must sum to 1 within {PI_SUM_ATOL}, got {pi.sum()!r}")
        labels = self.labels
        if labels is None:
            labels = block_labels(self.n, self.num_classes)
        labels = check_labels(labels, self.n)
        if labels.max() >= self.num_classes:
            raise ParameterError("labels exceed K-1")
        counts = np.bincount(labels, minlength=self.num_classes)
        if counts.min() == 0:
            raise ParameterError("every class must have at least one node")
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "labels", labels)

    @property
    def r(self) -> float:
        """Class separability (p - q) / (p + q); 0 for the empty model."""
        if self.p + self.q == 0.0:
            return 0.0
        return (self.p - self.q) / (self.p + self.q)

    def class_pi_sq_sums(self) -> np.ndarray:
        """Per-class sums of pi^2 (lambda, mu, ... in the two-class case)."""
        out = np.zeros(self.num_classes)
        np.add.at(out, self.labels, self.pi**2)
        return out


@dataclass(frozen=True)
class Graph:
    """A dense graph: symmetric nonnegative adjacency plus optional labels.

    Sampled graphs are binary with a zero diagonal; population graphs are
    weighted and may carry positive diagonal entries.
    """

    adjacency: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        adj = check_adjacency(self.adjacency)
        object.__setattr__(self, "adjacency", adj)
        if self.labels is not None:
            object.__setattr__(self, "labels", check_labels(self.labels, adj.shape[0]))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)


def make_pi(n: int, num_classes: int, mode: str, seed: int = 0) -> np.ndarray:
    """Build a degree-correction vector for canonically labelled classes.

    uniform        -> pi_i = 1/n.
    unif01         -> Unif(0,1) draws, renormalized inside each class to
                      sum 1/K.
    balanced_gamma -> like unif01, then each class is mixed toward its
                      uniform profile until the per-class sums of pi^2
                      agree within 1e-10 (sums stay exactly 1/K).
    """
    if mode not in PI_MODES:
        raise ParameterError(f"unknown pi mode {mode!r}; expected one of {PI_MODES}")
    labels = block_labels(n, num_classes)
    if mode == "uniform":
        return np.full(n, 1.0 / n)

    rng = substream(seed, "pi")
    u = rng.uniform(0.0, 1.0, size=n)
    pi = np.empty(n)
    for c in range(num_classes):
        mask = labels == c
        pi[mask] = u[mask] / (num_classes * u[mask].sum())
    if mode == "unif01":
        return pi

    # balanced_gamma: equalize per-class sums of pi^2 at fixed class sums.
    per_class = n // num_classes
    flat = 1.0 / (num_classes * per_class)
    floor = per_class * flat**2  # minimum achievable sum of squares
    for _ in range(100):
        sq = np.zeros(num_classes)
        np.add.at(sq, labels, pi**2)
        if sq.max() - sq.min() < 1e-10:
            return pi
        target = sq.mean()
        if target < floor - 1e-15:
            raise ConvergenceError("target sum of squares below the uniform floor")
        for c in range(num_classes):
            mask = labels == c
            g = float(np.sum(pi[mask] ** 2))
            if abs(g - floor) < 1e-18:
                continue
            ratio = (target - floor) / (g - floor)
            if ratio < 0.0:
                raise ConvergenceError("cannot balance pi^2 sums for this draw")
            t = np.sqrt(ratio)  # pi' = t*pi + (1-t)*flat keeps the class sum
            pi[mask] = t * pi[mask] + (1.0 - t) * flat
    raise ConvergenceError("pi^2 balancing did not converge in 100 iterations")


def population_adjacency(params: DcSbmParams) -> Graph:
    """Expected adjacency M = E[A], diagonal included."""
    same = params.labels[:, None] == params.labels[None, :]
    rate = np.where(same, params.p, params.q)
    return Graph(rate * np.outer(params.pi, params.pi), labels=params.labels)


def sample_graph(params: DcSbmParams, seed: int, pi_scale: float = 1.0) -> Graph:
    """Draw a simple graph with edge probabilities p_or_q * (s*pi_i) * (s*pi_j).

    With the default scale s=1 this is the model verbatim; since pi sums
    to 1 the resulting graphs are extremely sparse at experiment sizes.
    Denser draws matching raw Unif(0,1)-magnitude degree corrections are
    obtained with s = n/K.  All scaled probabilities must stay <= 1.
    """
    if pi_scale <= 0:
        raise ParameterError("pi_scale must be positive")
    spi = params.pi * pi_scale
    pmax = params.p * (spi.max() ** 2)
    if pmax > 1.0 + 1e-12:
        raise ParameterError(f"scaled edge probability {pmax:.4f} exceeds 1")
    same = params.labels[:, None] == params.labels[None, :]
    prob = np.where(same, params.p, params.q) * np.outer(spi, spi)

    rng = substream(seed, "graph")
    n = params.n
    iu = np.triu_indices(n, k=1)
    draws = rng.uniform(size=iu[0].shape[0])
    adj = np.zeros((n, n))
    adj[iu] = (draws < prob[iu]).astype(float)
    adj = adj + adj.T
    return Graph(adj, labels=params.labels)


def remove_isolated(graph: Graph) -> tuple[Graph, np.ndarray]:
    """Drop zero-degree nodes; returns the subgraph and the kept indices."""
    keep = np.flatnonzero(graph.degrees() > 0)
    adj = graph.adjacency[np.ix_(keep, keep)]
    labels = None if graph.labels is None else graph.labels[keep]
    return Graph(adj, labels=labels), keep
