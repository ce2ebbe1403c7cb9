"""Graph convolution (diffusion) operators built from an adjacency matrix.

Four operators are supported, named by their normalization:

    sym   D^(-1/2) A D^(-1/2)
    row   D^(-1) A
    col   A D^(-1)
    adj   A / n

Degrees are row sums of A (weighted for population graphs).  No
self-loop augmentation is applied here; callers who want A + I edit the
graph first.
"""

from __future__ import annotations

import numpy as np

from .dcsbm import Graph
from .errors import IsolatedNodeError, ParameterError
from .validation import check_adjacency

CONV_KINDS = ("sym", "row", "col", "adj")


def check_conv_kind(kind: str) -> str:
    if kind not in CONV_KINDS:
        raise ParameterError(f"unknown convolution {kind!r}; expected one of {CONV_KINDS}")
    return kind


def build_convolution(graph, kind: str) -> np.ndarray:
    """Return the operator S for `kind`; accepts a Graph or an adjacency.

    Zero-degree nodes are a hard error for the degree-normalized kinds:
    every downstream kernel formula divides by the degree, and silently
    zeroed rows would corrupt the kernels.
    """
    check_conv_kind(kind)
    adj = graph.adjacency if isinstance(graph, Graph) else check_adjacency(graph)
    n = adj.shape[0]
    if kind == "adj":
        return adj / n
    deg = adj.sum(axis=1)
    dead = np.flatnonzero(deg <= 0)
    if dead.size:
        raise IsolatedNodeError(int(dead[0]))
    if kind == "row":
        return adj / deg[:, None]
    if kind == "col":
        return adj / deg[None, :]
    inv_sqrt = 1.0 / np.sqrt(deg)
    return adj * np.outer(inv_sqrt, inv_sqrt)
