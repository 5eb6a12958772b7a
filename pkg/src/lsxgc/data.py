"""Value types and file I/O for ensembles, score matrices and ground truth.

All matrices are stored nodes x time (``N x T``). Files on disk are plain
UTF-8 CSV with ``,`` delimiters and LF line endings, or JSON of the form::

    {"method": "lsxgc", "nodes": ["x1", ...], "scores": [[...], ...]}

Numbers are written in their shortest round-trip decimal form, so a
save/load cycle reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Literal, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParams,
    NonFiniteValue,
    ParseError,
    RaggedRows,
)

__all__ = [
    "TimeSeriesEnsemble",
    "CausalityMatrix",
    "GroundTruthGraph",
    "AnalysisConfig",
    "as_matrix",
    "default_node_names",
    "load_ensemble_csv",
    "save_ensemble_csv",
    "save_matrix",
    "load_matrix",
    "load_graph",
]

Orientation = Literal["rows-are-nodes", "rows-are-time"]


def default_node_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeriesEnsemble:
    """N x T matrix of node time-series.

    Parameters
    ----------
    data : array_like, shape (N, T)
        One row per node, one column per time sample.
    node_names : sequence of str, optional
        Labels for the rows; defaults to ``x1 .. xN``.
    sampling_interval : float, optional
        Seconds between samples. Metadata only.
    """

    data: np.ndarray
    node_names: tuple = ()
    sampling_interval: float | None = None

    def __post_init__(self):
        data = _frozen(self.data)
        if data.ndim != 2:
            raise DimensionMismatch(f"ensemble must be 2-D, got shape {data.shape}")
        if data.shape[0] < 2:
            raise DimensionMismatch("ensemble needs at least two nodes")
        if not np.all(np.isfinite(data)):
            raise NonFiniteValue("ensemble contains NaN or Inf")
        names = tuple(self.node_names) or tuple(default_node_names(data.shape[0]))
        if len(names) != data.shape[0]:
            raise DimensionMismatch(
                f"{len(names)} node names for {data.shape[0]} rows"
            )
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "node_names", names)

    @property
    def n_nodes(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def with_data(self, data) -> "TimeSeriesEnsemble":
        return TimeSeriesEnsemble(data, self.node_names, self.sampling_interval)


@dataclass(frozen=True)
class CausalityMatrix:
    """Directed score matrix; ``scores[s, t]`` is the influence of s on t.

    The diagonal is always zero and never used for evaluation.
    """

    scores: np.ndarray
    method: str = "unknown"
    node_names: tuple = ()
    diagonal_policy: str = field(default="excluded", init=False)

    def __post_init__(self):
        scores = np.array(self.scores, dtype=float, copy=True)
        if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
            raise DimensionMismatch(f"scores must be square, got {scores.shape}")
        np.fill_diagonal(scores, 0.0)
        if not np.all(np.isfinite(scores)):
            raise NonFiniteValue(f"{self.method}: non-finite off-diagonal score")
        scores.setflags(write=False)
        names = tuple(self.node_names) or tuple(default_node_names(scores.shape[0]))
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "node_names", names)

    @property
    def n_nodes(self) -> int:
        return self.scores.shape[0]


@dataclass(frozen=True)
class GroundTruthGraph:
    """Binary directed adjacency; ``adjacency[s, t] == 1`` means s -> t."""

    adjacency: np.ndarray
    weights: np.ndarray | None = None
    node_names: tuple = ()

    def __post_init__(self):
        adj = np.asarray(self.adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise DimensionMismatch(f"adjacency must be square, got {adj.shape}")
        if not np.all((adj == 0) | (adj == 1)):
            raise InvalidParams("adjacency must be binary")
        adj = adj.astype(np.int8)
        if np.any(np.diag(adj)):
            raise InvalidParams("ground truth must not contain self-loops")
        if not adj.any():
            raise InvalidParams("ground truth must contain at least one edge")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        if self.weights is not None:
            object.__setattr__(self, "weights", _frozen(self.weights))
        names = tuple(self.node_names) or tuple(default_node_names(adj.shape[0]))
        object.__setattr__(self, "node_names", names)

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return int(self.adjacency.sum())


@dataclass(frozen=True)
class AnalysisConfig:
    """Settings shared by the estimators.

    ``p`` PCA components and ``m`` lags default to 1 and 2. ``k`` is the
    neighbour count of the k-NN estimators. ``literal_ratio`` flips the
    lsXGC index to ``log(var(e_s) / var(e_without_s))`` (negative when the
    source helps); ``refit_pca`` refits PCA on the data without the source
    instead of deleting the source's loading column.
    """

    p: int = 1
    m: int = 2
    k: int = 4
    ridge: float = 0.0
    standardize: bool = True
    literal_ratio: bool = False
    refit_pca: bool = False
    mi_lag: int = 0
    jitter: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.p < 1 or self.m < 1 or self.k < 1:
            raise InvalidParams("p, m and k must all be >= 1")
        if self.ridge < 0:
            raise InvalidParams("ridge must be non-negative")
        if self.mi_lag < 0:
            raise InvalidParams("mi_lag must be non-negative")


ArrayOrEnsemble = Union[TimeSeriesEnsemble, np.ndarray, Sequence]


def as_matrix(x: ArrayOrEnsemble) -> np.ndarray:
    """Return the float ``N x T`` array behind ``x``."""
    if isinstance(x, TimeSeriesEnsemble):
        return x.data
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D array, got shape {arr.shape}")
    return arr


def _fmt(value: float) -> str:
    v = float(value)
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(v)


def _parse_rows(path) -> tuple[list[str] | None, list[list[float]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(1, 1, "")
    header = None
    first = rows[0]
    try:
        [float(c) for c in first]
    except ValueError:
        header = [c.strip() for c in first]
        rows = rows[1:]
    width = len(header) if header is not None else len(rows[0]) if rows else 0
    body = []
    line0 = 2 if header is not None else 1
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRows(
                f"line {line0 + i} has {len(row)} fields, expected {width}"
            )
        vals = []
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(line0 + i, j + 1, cell) from None
            if not math.isfinite(v):
                raise NonFiniteValue(f"non-finite value {cell!r} at line {line0 + i}, column {j + 1}")
            vals.append(v)
        body.append(vals)
    return header, body


def load_ensemble_csv(
    path, orientation: Orientation = "rows-are-time", sampling_interval=None
) -> TimeSeriesEnsemble:
    """Read an ensemble from CSV.

    With ``rows-are-time`` each column is a node and the optional header
    holds node names. With ``rows-are-nodes`` each row is a node and the
    optional header labels time points (it is ignored).
    """
    if orientation not in ("rows-are-nodes", "rows-are-time"):
        raise InvalidParams(f"unknown orientation {orientation!r}")
    header, body = _parse_rows(path)
    data = np.array(body, dtype=float)
    if data.ndim != 2 or data.size == 0:
        raise ParseError(1, 1, "")
    if orientation == "rows-are-time":
        return TimeSeriesEnsemble(data.T, header or (), sampling_interval)
    return TimeSeriesEnsemble(data, (), sampling_interval)


def save_ensemble_csv(
    ensemble: TimeSeriesEnsemble, path, orientation: Orientation = "rows-are-time"
) -> None:
    """Write an ensemble to CSV, header first."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if orientation == "rows-are-time":
            w.writerow(ensemble.node_names)
            for col in ensemble.data.T:
                w.writerow([_fmt(v) for v in col])
        elif orientation == "rows-are-nodes":
            w.writerow([f"t{i + 1}" for i in range(ensemble.n_samples)])
            for row in ensemble.data:
                w.writerow([_fmt(v) for v in row])
        else:
            raise InvalidParams(f"unknown orientation {orientation!r}")


def _matrix_fields(matrix) -> tuple[str, tuple, np.ndarray]:
    if isinstance(matrix, CausalityMatrix):
        return matrix.method, matrix.node_names, matrix.scores
    if isinstance(matrix, GroundTruthGraph):
        return "ground_truth", matrix.node_names, matrix.adjacency
    raise TypeError(f"cannot save {type(matrix).__name__}")


def save_matrix(matrix, path, format: Literal["csv", "json"] | None = None) -> None:
    """Write a :class:`CausalityMatrix` or :class:`GroundTruthGraph`.

    The format is taken from the file extension when not given.
    """
    method, nodes, values = _matrix_fields(matrix)
    if format is None:
        format = "json" if os.fspath(path).endswith(".json") else "csv"
    if format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(nodes)
            for row in values:
                w.writerow([_fmt(v) for v in row])
    elif format == "json":
        payload = {
            "method": method,
            "nodes": list(nodes),
            "scores": [[float(v) if values.dtype.kind == "f" else int(v) for v in row]
                       for row in values],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
            fh.write("\n")
    else:
        raise InvalidParams(f"unknown format {format!r}")


def _read_matrix(path) -> tuple[str, list[str] | None, np.ndarray]:
    if os.fspath(path).endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        values = np.array(payload["scores"], dtype=float)
        return payload.get("method", "unknown"), payload.get("nodes"), values
    header, body = _parse_rows(path)
    return "unknown", header, np.array(body, dtype=float)


def load_matrix(path, method: str | None = None) -> CausalityMatrix:
    """Read a score matrix written by :func:`save_matrix`."""
    stored, nodes, values = _read_matrix(path)
    return CausalityMatrix(values, method or stored, tuple(nodes or ()))


def load_graph(path) -> GroundTruthGraph:
    """Read a ground-truth adjacency written by :func:`save_matrix`."""
    _, nodes, values = _read_matrix(path)
    return GroundTruthGraph(values, node_names=tuple(nodes or ()))
