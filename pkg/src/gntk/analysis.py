"""Class-separability statistics, depth sweeps and heatmap preparation."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .conv import build_convolution
from .dcsbm import Graph
from .errors import ParameterError
from .ntk import KernelMatrix, NtkConfig, linear_gram_sequence, ntk_exact, ntk_linear_closed, ntk_skip_linear_closed
from .validation import check_labels, check_square


def gntk_threads() -> int:
    """Parallelism cap from the GNTK_THREADS environment variable."""
    raw = os.environ.get("GNTK_THREADS", "").strip()
    if raw:
        try:
            val = int(raw)
        except ValueError as exc:
            raise ParameterError(f"GNTK_THREADS must be an integer, got {raw!r}") from exc
        if val >= 1:
            return val
    return os.cpu_count() or 1


@dataclass(frozen=True)
class GapReport:
    """Block statistics of one kernel: mean in-class value (diagonal
    entries excluded), mean out-of-class value, their gap, and the full
    K x K matrix of block means."""

    depth: int | None
    in_mean: float
    out_mean: float
    gap: float
    block_means: np.ndarray


def block_gap(kernel, labels) -> GapReport:
    """Average in-class minus out-of-class kernel value.

    Diagonal kernel entries are excluded from the in-class means: the
    self-similarity theta_ii carries no class structure.  The gap is
    the mean of the diagonal block means minus the mean of the
    off-diagonal block means.
    """
    if isinstance(kernel, KernelMatrix):
        values = kernel.values
        depth = kernel.meta.depth
    else:
        values = check_square(kernel, "kernel")
        depth = None
    labels = check_labels(labels, values.shape[0])
    num_classes = int(labels.max()) + 1
    counts = np.bincount(labels, minlength=num_classes)
    if counts.min() == 0:
        raise ParameterError("every class must be nonempty")

    masks = [labels == c for c in range(num_classes)]
    block = np.zeros((num_classes, num_classes))
    for a in range(num_classes):
        for b in range(a, num_classes):
            sub = values[np.ix_(masks[a], masks[b])]
            if a == b:
                denom = counts[a] * (counts[a] - 1)
                if denom == 0:
                    raise ParameterError(f"class {a} has a single node; in-class mean undefined")
                block[a, a] = (sub.sum() - np.trace(sub)) / denom
            else:
                block[a, b] = block[b, a] = sub.mean()
    in_mean = float(np.mean(np.diag(block)))
    off = block.sum() - np.trace(block)
    out_mean = float(off / (num_classes * (num_classes - 1)))
    return GapReport(depth=depth, in_mean=in_mean, out_mean=out_mean,
                     gap=in_mean - out_mean, block_means=block)


def _kernel_at_depth(S, x, cfg: NtkConfig, kind: str | None, grams) -> KernelMatrix:
    closed_ok = cfg.activation == "linear" and cfg.skip_activation == "linear" and x is None
    if not closed_ok:
        return ntk_exact(S, x, cfg, conv=kind)
    if cfg.skip == "none":
        return ntk_linear_closed(S, cfg.depth, conv=kind, grams=grams[0])
    return ntk_skip_linear_closed(S, cfg.depth, cfg.skip, alpha=cfg.alpha, conv=kind, grams=grams)


def gap_depth_sweep(graph: Graph, kind: str, cfg_base: NtkConfig, depths,
                    x: np.ndarray | None = None) -> list[GapReport]:
    """Block gap of the kernel at each depth, recomputed from one graph.

    Linear configurations without features run on the closed
    matrix-power path (skip variants on their explicit power
    expansion), sharing one power-Gram sequence across all depths;
    anything else runs the exact moment recursion per depth.  Depths
    are evaluated in parallel up to GNTK_THREADS workers and reported
    in input order.
    """
    depths = [int(d) for d in depths]
    if not depths:
        raise ParameterError("depths must be nonempty")
    if any(b <= a for a, b in zip(depths, depths[1:])):
        raise ParameterError("depths must be strictly increasing")
    if graph.labels is None:
        raise ParameterError("graph must carry labels for gap analysis")
    S = build_convolution(graph, kind)

    closed_ok = cfg_base.activation == "linear" and cfg_base.skip_activation == "linear" and x is None
    grams = None
    if closed_ok:
        grams = linear_gram_sequence(S, max(depths) + 1, with_cross=cfg_base.skip == "alpha")

    def one(depth: int) -> GapReport:
        cfg = NtkConfig(depth=depth, activation=cfg_base.activation, skip=cfg_base.skip,
                        alpha=cfg_base.alpha, skip_activation=cfg_base.skip_activation)
        kernel = _kernel_at_depth(S, x, cfg, kind, grams)
        return block_gap(kernel, graph.labels)

    workers = min(gntk_threads(), len(depths))
    if workers <= 1:
        return [one(d) for d in depths]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, depths))


def clip_percentile(kernel: KernelMatrix, lo: float, hi: float) -> KernelMatrix:
    """Clip kernel entries to the [lo, hi] percentile range.

    Percentiles are taken over all n^2 entries with linear
    interpolation between order statistics, the deterministic rule the
    heatmap exports rely on.
    """
    if not (0.0 <= lo < hi <= 100.0):
        raise ParameterError("need 0 <= lo < hi <= 100")
    values = kernel.values
    low, high = np.percentile(values, [lo, hi], method="linear")
    return KernelMatrix(np.clip(values, low, high), kernel.meta)
