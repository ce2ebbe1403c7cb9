"""Graph neural tangent kernels over degree-corrected block models.

Exact infinite-width GCN kernels (four graph convolutions, two skip
variants, linear/ReLU activations), their closed-form population values
with finite-depth and infinite-depth expressions, class-separability
analysis, kernel-regression node classification, and a Monte-Carlo
finite-width validator.
"""

__version__ = "0.1.0"

from .analysis import GapReport, block_gap, clip_percentile, gap_depth_sweep
from .conv import CONV_KINDS, build_convolution
from .dcsbm import (DcSbmParams, Graph, block_labels, make_pi, population_adjacency,
                    remove_isolated, sample_graph)
from .errors import (ConvergenceError, DivergenceError, GntkError, IsolatedNodeError,
                     ParameterError, ParseError, SolverError)
from .estimators import GraphNTK, NtkNodeClassifier
from .io import Dataset, export_matrix, load_dataset, load_kernel, load_matrix, save_edge_list
from .ntk import (KernelMatrix, KernelMeta, NtkConfig, activation_moments, empirical_ntk,
                  linear_gram_sequence, ntk_exact, ntk_linear_closed, ntk_skip_alpha,
                  ntk_skip_linear_closed, ntk_skip_pc, ntk_vanilla)
from .population import (PopulationParams, geometric_power_sum, pop_gram, pop_ntk_depth,
                         pop_ntk_limit, pop_skip_limit, population_ntk_matrix)
from .predict import SplitSpec, accuracy, kernel_regression_predict, make_split

__all__ = [
    "CONV_KINDS",
    "ConvergenceError",
    "Dataset",
    "DcSbmParams",
    "DivergenceError",
    "GapReport",
    "GntkError",
    "Graph",
    "GraphNTK",
    "IsolatedNodeError",
    "KernelMatrix",
    "KernelMeta",
    "NtkConfig",
    "NtkNodeClassifier",
    "ParameterError",
    "ParseError",
    "PopulationParams",
    "SolverError",
    "SplitSpec",
    "accuracy",
    "activation_moments",
    "block_gap",
    "block_labels",
    "build_convolution",
    "clip_percentile",
    "empirical_ntk",
    "export_matrix",
    "gap_depth_sweep",
    "geometric_power_sum",
    "kernel_regression_predict",
    "linear_gram_sequence",
    "load_dataset",
    "load_kernel",
    "load_matrix",
    "make_pi",
    "make_split",
    "ntk_exact",
    "ntk_linear_closed",
    "ntk_skip_alpha",
    "ntk_skip_linear_closed",
    "ntk_skip_pc",
    "ntk_vanilla",
    "pop_gram",
    "pop_ntk_depth",
    "pop_ntk_limit",
    "pop_skip_limit",
    "population_adjacency",
    "population_ntk_matrix",
    "remove_isolated",
    "sample_graph",
    "save_edge_list",
]
