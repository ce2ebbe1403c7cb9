"""Dataset ingestion and result export.

File formats:
  * edge list: one ``i<TAB>j`` pair per line, 0-indexed (any whitespace
    accepted on input); undirected, duplicates collapse.
  * labels: one integer per line, classes 0..K-1 with no gaps.
  * features: CSV, one row per node.
  * matrices: CSV at 17 significant digits, or JSON; kernels get a JSON
    sidecar ``<stem>.meta.json`` with their provenance.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import GapReport
from .dcsbm import Graph
from .errors import ParameterError, ParseError
from .ntk import KernelMatrix, KernelMeta, NtkConfig
from .validation import check_contiguous_classes

MATRIX_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Dataset:
    """A graph with labels and optional node features.

    A missing feature matrix selects the orthonormal-feature kernels
    (X X^T = I), the primary analysis regime.
    """

    graph: Graph
    labels: np.ndarray
    features: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self):
        n = self.graph.n
        labels = np.asarray(self.labels, dtype=int)
        if labels.shape != (n,):
            raise ParameterError(f"labels must have length {n}")
        check_contiguous_classes(labels)
        object.__setattr__(self, "labels", labels)
        if self.features is not None:
            feats = np.asarray(self.features, dtype=float)
            if feats.ndim != 2 or feats.shape[0] != n:
                raise ParameterError(f"features must be {n} x f, got {feats.shape}")
            object.__setattr__(self, "features", feats)

    @property
    def num_classes(self) -> int:
        return int(self.labels.max()) + 1


def _parse_int(token: str, path, line_no: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(path, line_no, f"expected an integer, got {token!r}") from None


def load_labels(label_path) -> np.ndarray:
    labels = []
    with open(label_path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            token = line.strip()
            if not token:
                continue
            labels.append(_parse_int(token, label_path, line_no))
    if not labels:
        raise ParseError(label_path, 1, "label file is empty")
    return np.asarray(labels, dtype=int)


def load_edge_list(edge_path, n: int) -> np.ndarray:
    adj = np.zeros((n, n))
    with open(edge_path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(edge_path, line_no, f"expected 'i j', got {line.strip()!r}")
            i = _parse_int(parts[0], edge_path, line_no)
            j = _parse_int(parts[1], edge_path, line_no)
            if not (0 <= i < n and 0 <= j < n):
                raise ParseError(edge_path, line_no, f"node index out of range 0..{n - 1}")
            adj[i, j] = 1.0
            adj[j, i] = 1.0
    return adj


def load_dataset(edge_path, label_path, feature_path=None, name: str | None = None) -> Dataset:
    """Read an edge list + labels (+ optional feature CSV) into a Dataset."""
    labels = load_labels(label_path)
    n = labels.shape[0]
    adj = load_edge_list(edge_path, n)
    features = None
    if feature_path is not None:
        features = np.loadtxt(feature_path, delimiter=",", ndmin=2)
        if features.shape[0] != n:
            raise ParseError(feature_path, 1,
                             f"feature rows ({features.shape[0]}) != label count ({n})")
    return Dataset(
        graph=Graph(adj, labels=labels),
        labels=labels,
        features=features,
        name=name or Path(edge_path).stem,
    )


def save_edge_list(graph: Graph, edge_path, label_path=None) -> None:
    """Write the upper-triangle edges as ``i<TAB>j`` lines (+ labels file)."""
    ii, jj = np.nonzero(np.triu(graph.adjacency, k=1))
    with open(edge_path, "w", encoding="utf-8") as fh:
        for i, j in zip(ii, jj):
            fh.write(f"{i}\t{j}\n")
    if label_path is not None:
        if graph.labels is None:
            raise ParameterError("graph has no labels to save")
        with open(label_path, "w", encoding="utf-8") as fh:
            for lab in graph.labels:
                fh.write(f"{lab}\n")


def export_matrix(matrix, path, format: str = "csv") -> None:
    """Write a matrix (or KernelMatrix, with meta sidecar) to disk."""
    if format not in MATRIX_FORMATS:
        raise ParameterError(f"format must be one of {MATRIX_FORMATS}")
    path = Path(path)
    if isinstance(matrix, KernelMatrix):
        values = matrix.values
        sidecar = path.with_suffix(".meta.json")
        sidecar.write_text(json.dumps(dataclasses.asdict(matrix.meta), indent=2) + "\n",
                           encoding="utf-8")
    else:
        values = np.asarray(matrix, dtype=float)
    if format == "csv":
        np.savetxt(path, values, fmt="%.17g", delimiter=",")
    else:
        path.write_text(json.dumps({"values": values.tolist()}) + "\n", encoding="utf-8")


def load_matrix(path, format: str = "csv") -> np.ndarray:
    if format not in MATRIX_FORMATS:
        raise ParameterError(f"format must be one of {MATRIX_FORMATS}")
    if format == "csv":
        return np.loadtxt(path, delimiter=",", ndmin=2)
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return np.asarray(payload["values"], dtype=float)


def load_kernel(path) -> KernelMatrix:
    """Re-read an exported kernel CSV together with its meta sidecar."""
    path = Path(path)
    values = load_matrix(path, "csv")
    meta_path = path.with_suffix(".meta.json")
    raw = json.loads(meta_path.read_text(encoding="utf-8"))
    return KernelMatrix(values, KernelMeta(**raw))


def kernel_meta_for(conv: str | None, cfg: NtkConfig, source: str) -> KernelMeta:
    return KernelMeta.from_config(cfg, source, conv)


def write_gap_reports(reports: list[tuple[str, GapReport]], path) -> None:
    """CSV rows (conv, depth, in_mean, out_mean, gap)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("conv,depth,in_mean,out_mean,gap\n")
        for kind, rep in reports:
            fh.write(f"{kind},{rep.depth},{rep.in_mean:.17g},{rep.out_mean:.17g},{rep.gap:.17g}\n")


def gap_reports_json(reports: list[tuple[str, GapReport]]) -> str:
    payload = [
        {
            "conv": kind,
            "depth": rep.depth,
            "in_mean": rep.in_mean,
            "out_mean": rep.out_mean,
            "gap": rep.gap,
            "block_means": rep.block_means.tolist(),
        }
        for kind, rep in reports
    ]
    return json.dumps(payload, indent=2)


def export_predictions(path, node_ids, predicted, truth) -> None:
    """CSV rows (node_id, predicted_class, true_class)."""
    node_ids = np.asarray(node_ids, dtype=int)
    predicted = np.asarray(predicted, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if not (node_ids.shape == predicted.shape == truth.shape):
        raise ParameterError("node_ids, predicted and truth must have equal length")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node_id,predicted_class,true_class\n")
        for nid, p_, t_ in zip(node_ids, predicted, truth):
            fh.write(f"{nid},{p_},{t_}\n")
