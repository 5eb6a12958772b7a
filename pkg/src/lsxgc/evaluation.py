"""Scoring against ground truth and cross-method comparison.

``auroc`` uses the Mann-Whitney pair-counting definition over off-diagonal
cells, ``wilcoxon_signed_rank`` compares paired AUROC vectors, and
``run_benchmark`` times every estimator over a list of realizations.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm, rankdata

from .baselines import granger_matrix, mi_matrix, te_matrix
from .core import lsxgc_matrix
from .data import AnalysisConfig, CausalityMatrix, GroundTruthGraph
from .errors import (
    AllDifferencesZero,
    DegenerateGroundTruth,
    DimensionMismatch,
    EmptyInput,
    InvalidParams,
    LsxgcError,
    TooFewSamples,
)

__all__ = [
    "METHODS",
    "MethodResult",
    "BenchmarkReport",
    "parse_methods",
    "estimate",
    "auroc",
    "wilcoxon_signed_rank",
    "summary_stats",
    "run_benchmark",
]

METHODS = ("lsxgc", "gc", "te", "mi")
EXACT_MAX_N = 25


def parse_methods(selection) -> list[str]:
    """Normalize ``"all"``, ``"lsxgc,gc"`` or a list of names."""
    if isinstance(selection, str):
        selection = [s.strip() for s in selection.split(",") if s.strip()]
    out = []
    for name in selection:
        name = name.lower()
        if name == "all":
            out += [m for m in METHODS if m not in out]
        elif name in METHODS:
            if name not in out:
                out.append(name)
        else:
            raise InvalidParams(f"unknown method {name!r}; choose from {METHODS + ('all',)}")
    if not out:
        raise InvalidParams("no method selected")
    return out


def estimate(method: str, X, cfg: AnalysisConfig | None = None, jobs: int = 1) -> CausalityMatrix:
    """Dispatch to one of the four estimators by name."""
    cfg = cfg or AnalysisConfig()
    if method == "lsxgc":
        return lsxgc_matrix(X, cfg, jobs)
    if method == "gc":
        return granger_matrix(X, cfg=cfg, jobs=jobs)
    if method == "te":
        return te_matrix(X, cfg, jobs)
    if method == "mi":
        return mi_matrix(X, cfg, jobs)
    raise InvalidParams(f"unknown method {method!r}")


def _scores(x) -> np.ndarray:
    return x.scores if isinstance(x, CausalityMatrix) else np.asarray(x, dtype=float)


def _adjacency(g) -> np.ndarray:
    return g.adjacency if isinstance(g, GroundTruthGraph) else np.asarray(g)


def auroc(scores, gt) -> float:
    """Probability that a random true edge outscores a random non-edge.

    Ties count one half; the diagonal is ignored.

    Raises
    ------
    DegenerateGroundTruth
        If the off-diagonal cells are all edges or all non-edges.
    """
    S = _scores(scores)
    G = _adjacency(gt)
    if S.shape != G.shape or S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"scores {S.shape} vs ground truth {G.shape}")
    off = ~np.eye(S.shape[0], dtype=bool)
    labels = G[off].astype(bool)
    values = S[off]
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateGroundTruth("need at least one edge and one non-edge")
    ranks = rankdata(values)
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def _exact_tail(doubled_ranks: np.ndarray, w2: int) -> float:
    """P(W+ <= w) and P(W+ >= w) under random signs, ranks doubled to integers."""
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for r in doubled_ranks:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    counts /= 2.0 ** len(doubled_ranks)
    return counts[: w2 + 1].sum(), counts[w2:].sum()


def wilcoxon_signed_rank(a, b) -> float:
    """Two-sided Wilcoxon signed-rank p-value for paired samples.

    Zero differences are dropped. For at most 25 remaining pairs the p-value
    comes from the exact permutation distribution (mid-ranks for ties);
    above that a normal approximation with tie and continuity corrections.
    """
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if d.ndim != 1:
        raise DimensionMismatch("a and b must be equal-length vectors")
    d = d[d != 0]
    if d.size == 0:
        raise AllDifferencesZero("every paired difference is zero")
    n = d.size
    if n < 5:
        raise TooFewSamples(f"need at least 5 non-zero differences, got {n}")
    ranks = rankdata(np.abs(d))
    w_plus = ranks[d > 0].sum()
    if n <= EXACT_MAX_N:
        doubled = np.rint(2 * ranks).astype(int)
        lo, hi = _exact_tail(doubled, int(round(2 * w_plus)))
        p = 2.0 * min(lo, hi)
    else:
        mean = n * (n + 1) / 4
        _, ties = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24 - np.sum(ties**3 - ties) / 48
        z = max(abs(w_plus - mean) - 0.5, 0.0) / np.sqrt(var)
        p = 2.0 * norm.sf(z)
    return float(min(max(p, np.finfo(float).tiny), 1.0))


def summary_stats(values) -> dict:
    """Median, quartiles, Tukey whiskers (clipped to the data), mean and std."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise EmptyInput("summary of an empty vector")
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    # shifted moments are exact for constant input
    shifted = v - v[0]
    return {
        "median": float(med),
        "q1": float(q1),
        "q3": float(q3),
        "whisker_lo": float(max(v.min(), q1 - 1.5 * iqr)),
        "whisker_hi": float(min(v.max(), q3 + 1.5 * iqr)),
        "mean": float(v[0] + shifted.mean()),
        "std": float(shifted.std(ddof=1)) if v.size > 1 else 0.0,
    }


@dataclass
class MethodResult:
    """AUROC per realization and compute time for one estimator.

    ``elapsed_s`` is wall-clock over the whole method; ``cell_time_s`` sums
    the per-realization durations (they differ under parallel execution).
    """

    method: str
    auroc_per_realization: np.ndarray
    elapsed_s: float
    cell_time_s: float = 0.0
    error: str | None = None

    @property
    def summary(self) -> dict:
        return summary_stats(self.auroc_per_realization) if len(self.auroc_per_realization) else {}


@dataclass
class BenchmarkReport:
    results: list[MethodResult]
    pairwise_p: np.ndarray
    config: dict = field(default_factory=dict)

    def method(self, name: str) -> MethodResult:
        for r in self.results:
            if r.method == name:
                return r
        raise KeyError(name)

    def wilcoxon(self) -> dict[str, float]:
        """Named p-values, e.g. ``{"lsxgc_vs_gc": ...}``."""
        out = {}
        names = [r.method for r in self.results]
        for i, a in enumerate(names):
            for j in range(i + 1, len(names)):
                if np.isfinite(self.pairwise_p[i, j]):
                    out[f"{a}_vs_{names[j]}"] = float(self.pairwise_p[i, j])
        return out

    def to_dict(self) -> dict:
        methods = []
        for r in self.results:
            entry = {
                "name": r.method,
                "auroc": [float(x) for x in r.auroc_per_realization],
                "elapsed_s": r.elapsed_s,
                "cell_time_s": r.cell_time_s,
                "summary": r.summary,
            }
            if r.error:
                entry["error"] = r.error
            methods.append(entry)
        return {"methods": methods, "wilcoxon_p": self.wilcoxon(), "config": self.config}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def ranked(self) -> list[MethodResult]:
        ok = [r for r in self.results if len(r.auroc_per_realization)]
        return sorted(ok, key=lambda r: -r.summary["median"])

    def summary_lines(self) -> list[str]:
        lines = []
        for r in self.ranked():
            s = r.summary
            lines.append(
                f"{r.method:<6} median AUROC {s['median']:.3f} "
                f"[{s['q1']:.3f}, {s['q3']:.3f}]  {r.elapsed_s:.2f} s"
            )
        return lines

    def table(self) -> str:
        """Plain-text table: method, time in seconds, AUROC mean +- std."""
        rows = [("", "Time (seconds)", "AUROC")]
        for r in self.results:
            if len(r.auroc_per_realization):
                s = r.summary
                rows.append((r.method, f"{r.elapsed_s:.3g}", f"{s['mean']:.3f} ± {s['std']:.3f}"))
            else:
                rows.append((r.method, "-", f"failed: {r.error}"))
        widths = [max(len(row[i]) for row in rows) for i in range(3)]
        return "\n".join(
            " | ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows
        ) + "\n"


def _run_method(method, dataset, cfg, jobs):
    def cell(real):
        t0 = time.perf_counter()
        scores = estimate(method, real.ensemble, cfg)
        dt = time.perf_counter() - t0
        return auroc(scores, real.graph), dt

    wall0 = time.perf_counter()
    try:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                cells = list(pool.map(cell, dataset))
        else:
            cells = [cell(r) for r in dataset]
    except LsxgcError as exc:
        return MethodResult(method, np.array([]), time.perf_counter() - wall0, 0.0,
                            f"{type(exc).__name__}: {exc}")
    wall = time.perf_counter() - wall0
    return MethodResult(method, np.array([c[0] for c in cells]), wall,
                        float(sum(c[1] for c in cells)))


def run_benchmark(dataset, methods="all", cfg: AnalysisConfig | None = None, jobs: int = 1,
                  config: dict | None = None) -> BenchmarkReport:
    """Score every selected method on every realization.

    Timing covers estimation only. A method that fails on any realization is
    kept in the report with its error and no AUROCs; other methods run on.
    """
    cfg = cfg or AnalysisConfig()
    dataset = list(dataset)
    if not dataset:
        raise EmptyInput("empty dataset")
    names = parse_methods(methods)
    results = [_run_method(m, dataset, cfg, jobs) for m in names]
    k = len(results)
    P = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(i + 1, k):
            a, b = results[i].auroc_per_realization, results[j].auroc_per_realization
            if len(a) == 0 or len(a) != len(b):
                continue
            try:
                p = wilcoxon_signed_rank(a, b)
            except AllDifferencesZero:
                p = 1.0
            except TooFewSamples:
                continue
            P[i, j] = P[j, i] = p
    snapshot = {"analysis": {f: getattr(cfg, f) for f in cfg.__dataclass_fields__}}
    snapshot.update(config or {})
    return BenchmarkReport(results, P, snapshot)
