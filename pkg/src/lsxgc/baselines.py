"""Competitor estimators: multivariate Granger causality, MI and TE matrices.

All three standardize their input first when ``cfg.standardize`` is set, so
they see the same data as :func:`lsxgc.core.lsxgc_matrix`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial import cKDTree

from .core import lag_embed
from .data import AnalysisConfig, CausalityMatrix, TimeSeriesEnsemble, as_matrix
from .errors import TooFewSamples, UnderdeterminedSystem, ZeroResidualVariance
from .knn import _check_spread, jitter, ksg_cmi, ksg_mi
from .numerics import fit_affine, nested_residual_variances, residual_variance, standardize

__all__ = ["granger_matrix", "mi_matrix", "te_matrix"]


def _names(X):
    return X.node_names if isinstance(X, TimeSeriesEnsemble) else ()


def _prepare(X, cfg):
    X = as_matrix(X)
    return standardize(X) if cfg.standardize else X


def _map(fn, items, jobs):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def granger_matrix(X, m: int | None = None, cfg: AnalysisConfig | None = None,
                   jobs: int = 1) -> CausalityMatrix:
    """Conditional (multivariate) Granger causality.

    ``scores[s, t] = log(var(restricted_t) / var(full_t))`` where the full
    model regresses ``x_t`` on ``m`` lags of every node and the restricted
    model drops all lags of ``x_s``.

    Raises
    ------
    UnderdeterminedSystem
        When ``T - m <= N * m + 1``: the full VAR has at least as many
        parameters as samples.
    """
    cfg = cfg or AnalysisConfig()
    m = cfg.m if m is None else m
    names = _names(X)
    X = as_matrix(X)
    N, T = X.shape
    if T - m <= N * m + 1:
        raise UnderdeterminedSystem(N, m, T)
    X = _prepare(X, cfg)
    design = lag_embed(X, m).matrix
    targets = X[:, m:]
    source_of_row = np.arange(N * m) % N

    def rows(sources):
        if cfg.ridge > 0:
            full = fit_affine(design, targets, cfg.ridge)
            var_full = np.tile(residual_variance(full.residuals(design, targets)), (len(sources), 1))
            var_r = []
            for s in sources:
                restricted = design[source_of_row != s]
                fit = fit_affine(restricted, targets, cfg.ridge)
                var_r.append(residual_variance(fit.residuals(restricted, targets)))
            var_r = np.vstack(var_r)
        else:
            # restricted regressors first, then the source's own lags
            ordered = np.stack([
                np.vstack([design[source_of_row != s], design[source_of_row == s]])
                for s in sources
            ])
            var_r, var_full = nested_residual_variances(ordered, targets, (N - 1) * m)
        if np.any(var_full < 1e-15):
            raise ZeroResidualVariance(int(np.argmin(var_full.min(axis=0))))
        out = np.log(var_r / var_full)
        out[np.arange(len(sources)), sources] = 0.0
        return out

    chunks = np.array_split(np.arange(N), max(jobs, 1))
    return CausalityMatrix(np.vstack(_map(rows, chunks, jobs)), "gc", names)


def _jittered(X, cfg):
    for v in X:
        _check_spread(v)
    return np.vstack([jitter(x, cfg.jitter, [cfg.seed, i]) for i, x in enumerate(X)])


def mi_matrix(X, cfg: AnalysisConfig | None = None, jobs: int = 1) -> CausalityMatrix:
    """Pairwise k-NN mutual information.

    With ``cfg.mi_lag == 0`` the matrix is symmetric: each unordered pair is
    estimated once and mirrored. A positive lag scores ``x_s(t - lag)``
    against ``x_t(t)`` instead.
    """
    cfg = cfg or AnalysisConfig()
    names = _names(X)
    X = _jittered(_prepare(X, cfg), cfg)
    N, T = X.shape
    lag = cfg.mi_lag
    if T - lag <= cfg.k + 1:
        raise TooFewSamples(f"MI needs more than k + 1 samples, got {T - lag}")
    if lag == 0:
        pairs = [(s, t) for s in range(N) for t in range(s + 1, N)]
    else:
        pairs = [(s, t) for s in range(N) for t in range(N) if s != t]

    def one(pair):
        s, t = pair
        return ksg_mi(X[s, : T - lag], X[t, lag:], cfg.k)

    values = _map(one, pairs, jobs)
    M = np.zeros((N, N))
    for (s, t), v in zip(pairs, values):
        M[s, t] = v
        if lag == 0:
            M[t, s] = v
    return CausalityMatrix(M, "mi", names)


def te_matrix(X, cfg: AnalysisConfig | None = None, jobs: int = 1) -> CausalityMatrix:
    """Transfer entropy for every ordered pair (embedding 1, lag 1)."""
    cfg = cfg or AnalysisConfig()
    names = _names(X)
    X = _jittered(_prepare(X, cfg), cfg)
    N, T = X.shape
    if T <= cfg.k + 2:
        raise TooFewSamples(f"TE needs T > k + 2, got {T}")
    future, past = X[:, 1:], X[:, :-1]

    def target_row(t):
        # trees over the target's own coordinates are shared by all sources
        xz_tree = cKDTree(np.column_stack([future[t], past[t]]))
        z_tree = cKDTree(past[t][:, None])
        col = np.zeros(N)
        for s in range(N):
            if s != t:
                col[s] = ksg_cmi(future[t], past[s], past[t], cfg.k,
                                 trees=(xz_tree, None, z_tree))
        return col

    cols = _map(target_row, range(N), jobs)
    return CausalityMatrix(np.column_stack(cols), "te", names)
