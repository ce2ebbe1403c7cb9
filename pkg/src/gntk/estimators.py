"""Scikit-learn style estimators wrapping the kernel toolkit.

`GraphNTK` is a transformer from a graph adjacency to its n x n kernel,
usable wherever a precomputed kernel is accepted; `NtkNodeClassifier`
is a transductive classifier in the style of the semi-supervised
estimators (unlabelled nodes are marked -1 in y, prediction takes node
indices as samples).  Both expose their configuration through
get_params/set_params so they compose with pipelines and search.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin

from .conv import build_convolution
from .errors import ParameterError
from .ntk import KernelMatrix, NtkConfig, ntk_exact, ntk_linear_closed, ntk_skip_linear_closed
from .predict import SplitSpec, default_ridge, _coefficients
from .validation import check_adjacency, check_index_array, check_labels


def _compute_kernel(adjacency, features, conv, cfg: NtkConfig) -> KernelMatrix:
    S = build_convolution(check_adjacency(adjacency), conv)
    if cfg.activation == "linear" and cfg.skip_activation == "linear" and features is None:
        if cfg.skip == "none":
            return ntk_linear_closed(S, cfg.depth, conv=conv)
        return ntk_skip_linear_closed(S, cfg.depth, cfg.skip, alpha=cfg.alpha, conv=conv)
    return ntk_exact(S, features, cfg, conv=conv)


class GraphNTK(BaseEstimator, TransformerMixin):
    """Transformer: adjacency matrix -> infinite-width GCN kernel.

    Parameters mirror the kernel configuration (convolution kind,
    depth, activation, skip variant).  `fit(A)` computes and stores the
    kernel; `transform()` returns it, and `transform(B)` on a different
    adjacency computes a fresh kernel without changing the fitted one.
    """

    def __init__(self, conv="sym", depth=1, activation="linear", skip="none",
                 alpha=None, skip_activation="linear"):
        self.conv = conv
        self.depth = depth
        self.activation = activation
        self.skip = skip
        self.alpha = alpha
        self.skip_activation = skip_activation

    def _config(self) -> NtkConfig:
        return NtkConfig(depth=self.depth, activation=self.activation, skip=self.skip,
                         alpha=self.alpha, skip_activation=self.skip_activation)

    def fit(self, X, y=None, features=None):
        adjacency = check_adjacency(X)
        self.kernel_matrix_ = _compute_kernel(adjacency, features, self.conv, self._config())
        self.kernel_ = self.kernel_matrix_.values
        self.n_nodes_ = adjacency.shape[0]
        self._fitted_adjacency = adjacency
        return self

    def transform(self, X=None, features=None):
        if not hasattr(self, "kernel_"):
            raise ParameterError("GraphNTK.transform called before fit")
        if X is None or (np.shape(X) == self._fitted_adjacency.shape
                         and np.array_equal(X, self._fitted_adjacency)):
            return self.kernel_
        return _compute_kernel(check_adjacency(X), features, self.conv, self._config()).values

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, **fit_params).transform(None)


class NtkNodeClassifier(BaseEstimator, ClassifierMixin):
    """Transductive node classifier: NTK + kernel ridge regression.

    `fit(A, y)` takes the full adjacency and a label vector with -1 for
    unlabelled nodes; it computes the kernel, solves the one-vs-all
    ridge system on the labelled nodes and stores `transduction_`, the
    predicted class of every node.  `predict(idx)` returns predictions
    for node indices (so `score(test_idx, y_test)` works as usual).
    """

    def __init__(self, conv="row", depth=2, activation="linear", skip="none",
                 alpha=None, skip_activation="linear", ridge=None):
        self.conv = conv
        self.depth = depth
        self.activation = activation
        self.skip = skip
        self.alpha = alpha
        self.skip_activation = skip_activation
        self.ridge = ridge

    def fit(self, X, y, features=None):
        adjacency = check_adjacency(X)
        n = adjacency.shape[0]
        y = np.asarray(y)
        if y.shape != (n,):
            raise ParameterError(f"y must have length {n} (-1 marks unlabelled nodes)")
        train = np.flatnonzero(y >= 0)
        if train.size == 0:
            raise ParameterError("at least one labelled node is required")
        y_train = check_labels(y[train])
        self.classes_ = np.unique(y_train)
        col = {c: i for i, c in enumerate(self.classes_)}
        onehot = np.zeros((train.size, self.classes_.size))
        onehot[np.arange(train.size), [col[c] for c in y_train]] = 1.0

        cfg = NtkConfig(depth=self.depth, activation=self.activation, skip=self.skip,
                        alpha=self.alpha, skip_activation=self.skip_activation)
        kernel = _compute_kernel(adjacency, features, self.conv, cfg)
        test = np.setdiff1d(np.arange(n), train)
        split = SplitSpec(train=train, test=test, y_train=onehot)
        ridge = self.ridge if self.ridge is not None else default_ridge(kernel, split)
        coef = _coefficients(kernel.values, split, float(ridge))
        self.scores_ = kernel.values[:, train] @ coef
        self.transduction_ = self.classes_[self.scores_.argmax(axis=1)]
        self.kernel_matrix_ = kernel
        self.n_nodes_ = n
        return self

    def decision_function(self, X=None):
        if not hasattr(self, "scores_"):
            raise ParameterError("NtkNodeClassifier.decision_function called before fit")
        if X is None:
            return self.scores_
        idx = check_index_array(X, self.n_nodes_, "node indices")
        return self.scores_[idx]

    def predict(self, X=None):
        if not hasattr(self, "transduction_"):
            raise ParameterError("NtkNodeClassifier.predict called before fit")
        if X is None:
            return self.transduction_
        idx = check_index_array(X, self.n_nodes_, "node indices")
        return self.transduction_[idx]
