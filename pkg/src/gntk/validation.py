"""Input validation helpers.

Small `check_*` functions in the scikit-learn style: they coerce to
float arrays, verify shapes and basic structure, and raise
:class:`~gntk.errors.ParameterError` with a readable message otherwise.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

SYMMETRY_ATOL = 1e-12


def as_float_matrix(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise ParameterError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite entries")
    return arr


def check_square(a, name: str = "matrix") -> np.ndarray:
    arr = as_float_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise ParameterError(f"{name} must be square, got shape {arr.shape}")
    return arr


def check_adjacency(a, name: str = "adjacency") -> np.ndarray:
    """Square, symmetric (within 1e-12) and entrywise nonnegative."""
    arr = check_square(a, name)
    scale = max(1.0, float(np.abs(arr).max(initial=0.0)))
    if np.abs(arr - arr.T).max(initial=0.0) > SYMMETRY_ATOL * scale:
        raise ParameterError(f"{name} is not symmetric within {SYMMETRY_ATOL}")
    if arr.min(initial=0.0) < 0:
        raise ParameterError(f"{name} has negative entries")
    return arr


def check_labels(labels, n: int | None = None, name: str = "labels") -> np.ndarray:
    lab = np.asarray(labels)
    if lab.ndim != 1:
        raise ParameterError(f"{name} must be 1-dimensional")
    if not np.issubdtype(lab.dtype, np.integer):
        if not np.all(lab == lab.astype(int)):
            raise ParameterError(f"{name} must be integers")
        lab = lab.astype(int)
    if n is not None and lab.shape[0] != n:
        raise ParameterError(f"{name} has length {lab.shape[0]}, expected {n}")
    if lab.size and lab.min() < 0:
        raise ParameterError(f"{name} must be nonnegative class indices")
    return lab


def check_contiguous_classes(labels, name: str = "labels") -> int:
    """Classes must cover 0..K-1 with no gaps; returns K."""
    lab = check_labels(labels, name=name)
    classes = np.unique(lab)
    k = int(classes[-1]) + 1 if classes.size else 0
    if classes.size != k:
        missing = sorted(set(range(k)) - set(classes.tolist()))
        raise ParameterError(f"{name} skip classes {missing}; expected 0..{k - 1}")
    return k


def check_index_array(idx, n: int, name: str = "indices") -> np.ndarray:
    arr = np.asarray(idx)
    if arr.ndim != 1:
        raise ParameterError(f"{name} must be 1-dimensional")
    arr = arr.astype(int)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ParameterError(f"{name} out of range for n={n}")
    return arr
