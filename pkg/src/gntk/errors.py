"""Exception types shared across the package."""


class GntkError(Exception):
    """Base class for all gntk errors."""


class ParameterError(GntkError, ValueError):
    """A model or kernel parameter is outside its valid range."""


class IsolatedNodeError(GntkError, ValueError):
    """A degree-normalized convolution was requested on a graph with a
    zero-degree node."""

    def __init__(self, node: int):
        self.node = node
        super().__init__(
            f"node {node} has degree 0; degree-normalized convolutions are "
            f"undefined (remove isolated nodes or use the scaled adjacency)"
        )


class ConvergenceError(GntkError, RuntimeError):
    """An iterative procedure failed to reach its tolerance."""


class DivergenceError(GntkError, ValueError):
    """An infinite-depth kernel value does not exist for the given
    parameters (geometric base >= 1)."""


class SolverError(GntkError, RuntimeError):
    """A linear system could not be solved."""


class ParseError(GntkError, ValueError):
    """A data file could not be parsed."""

    def __init__(self, path, line_no: int, message: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")
