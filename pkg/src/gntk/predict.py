"""Semi-supervised node classification by kernel ridge regression.

The infinite-width predictor is a kernel machine: fit one-vs-all ridge
coefficients on the labelled nodes and score the rest with the kernel
columns.  The ridge default 1e-6 * trace(K_train) / m keeps the solve
well-posed without materially moving the predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ParameterError, SolverError
from .ntk import KernelMatrix
from .seeding import substream
from .validation import check_index_array, check_square


@dataclass(frozen=True)
class SplitSpec:
    """Observed/held-out node index sets plus one-hot train labels."""

    train: np.ndarray
    test: np.ndarray
    y_train: np.ndarray

    def __post_init__(self):
        train = np.asarray(self.train, dtype=int)
        test = np.asarray(self.test, dtype=int)
        if train.ndim != 1 or test.ndim != 1:
            raise ParameterError("train and test must be 1-d index arrays")
        if np.intersect1d(train, test).size:
            raise ParameterError("train and test must be disjoint")
        y = np.asarray(self.y_train, dtype=float)
        if y.ndim != 2 or y.shape[0] != train.shape[0]:
            raise ParameterError("y_train must be m x K, one row per train node")
        ones = (y == 1.0).sum(axis=1)
        if not (np.all(ones == 1) and np.all((y == 0.0) | (y == 1.0))):
            raise ParameterError("y_train rows must be one-hot")
        object.__setattr__(self, "train", train)
        object.__setattr__(self, "test", test)
        object.__setattr__(self, "y_train", y)

    @property
    def num_classes(self) -> int:
        return self.y_train.shape[1]


def make_split(labels, train_fraction: float, seed: int, num_classes: int | None = None) -> SplitSpec:
    """Random train/test split with one-hot labels for the train part."""
    labels = np.asarray(labels, dtype=int)
    n = labels.shape[0]
    if not (0.0 < train_fraction < 1.0):
        raise ParameterError("train_fraction must be in (0, 1)")
    k = num_classes if num_classes is not None else int(labels.max()) + 1
    m = max(1, int(round(train_fraction * n)))
    perm = substream(seed, "split").permutation(n)
    train, test = perm[:m], perm[m:]
    y = np.zeros((m, k))
    y[np.arange(m), labels[train]] = 1.0
    return SplitSpec(train=train, test=test, y_train=y)


def _coefficients(values: np.ndarray, split: SplitSpec, ridge: float) -> np.ndarray:
    k_tt = values[np.ix_(split.train, split.train)]
    m = k_tt.shape[0]
    system = k_tt + ridge * np.eye(m) if ridge > 0 else k_tt
    try:
        return scipy.linalg.solve(system, split.y_train, assume_a="sym")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(
            f"train-block system is singular (ridge={ridge!r}); pass ridge > 0"
        ) from exc


def default_ridge(kernel, split: SplitSpec) -> float:
    values = kernel.values if isinstance(kernel, KernelMatrix) else np.asarray(kernel, float)
    k_tt = values[np.ix_(split.train, split.train)]
    return 1e-6 * float(np.trace(k_tt)) / k_tt.shape[0]


def kernel_regression_predict(kernel, split: SplitSpec, ridge: float | None = None) -> np.ndarray:
    """Predicted classes for the test nodes.

    Solves (K_train,train + ridge I) C = Y and scores test nodes with
    K_test,train C; prediction is the argmax score, ties resolved
    toward the lowest class index.  ridge=None takes the trace-scaled
    default; an explicit ridge=0 attempts an unregularized solve and
    raises SolverError if the train block is singular.
    """
    values = kernel.values if isinstance(kernel, KernelMatrix) else check_square(kernel, "kernel")
    n = values.shape[0]
    check_index_array(split.train, n, "train")
    check_index_array(split.test, n, "test")
    if ridge is None:
        ridge = default_ridge(values, split)
    if ridge < 0:
        raise ParameterError("ridge must be >= 0")
    coef = _coefficients(values, split, float(ridge))
    scores = values[np.ix_(split.test, split.train)] @ coef
    return scores.argmax(axis=1)


def accuracy(pred, truth) -> float:
    """Fraction of exact matches."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ParameterError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ParameterError("cannot score an empty prediction vector")
    return float(np.mean(pred == truth))
