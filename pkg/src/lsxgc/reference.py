"""Slow, loop-based lsXGC used only to cross-check :mod:`lsxgc.core`.

Nothing here imports the fast path: standardization, PCA (covariance
eigendecomposition instead of SVD), lag stacking, the normal equations and
the variances are all written out by hand.
"""

from __future__ import annotations

import math

import numpy as np

from .data import AnalysisConfig, as_matrix
from .errors import TooFewSamples, ZeroResidualVariance

__all__ = ["lsxgc_reference_oracle"]


def _zscore(X):
    N, T = len(X), len(X[0])
    out = []
    for i in range(N):
        mu = sum(X[i]) / T
        var = sum((v - mu) ** 2 for v in X[i]) / (T - 1)
        sd = math.sqrt(var)
        out.append([(v - mu) / sd for v in X[i]])
    return out


def _top_axes(X, p):
    """Leading eigenvectors of the sample covariance, plus the node means."""
    N, T = len(X), len(X[0])
    mu = [sum(row) / T for row in X]
    C = np.zeros((N, N))
    for i in range(N):
        for j in range(i, N):
            c = 0.0
            for k in range(T):
                c += (X[i][k] - mu[i]) * (X[j][k] - mu[j])
            C[i, j] = C[j, i] = c / (T - 1)
    vals, vecs = np.linalg.eigh(C)
    order = np.argsort(vals)[::-1][:p]
    return mu, vecs[:, order].T


def _project(X, mu, W, rows):
    T = len(X[0])
    Z = []
    for a in range(W.shape[0]):
        z = []
        for k in range(T):
            acc = 0.0
            for col, i in enumerate(rows):
                acc += W[a, col] * (X[i][k] - mu[i])
            z.append(acc)
        Z.append(z)
    return Z


def _residual_variances(series, X, m, ridge):
    """Regress every node of X on m lags of ``series``; per-node residual variance."""
    T = len(X[0])
    q = len(series)
    D = q * m + 1
    samples = []
    for t in range(m, T):
        row = [1.0]
        for lag in range(1, m + 1):
            for r in range(q):
                row.append(series[r][t - lag])
        samples.append(row)
    G = np.zeros((D, D))
    for row in samples:
        for a in range(D):
            for b in range(D):
                G[a, b] += row[a] * row[b]
    for a in range(1, D):
        G[a, a] += ridge
    out = []
    for i in range(len(X)):
        rhs = np.zeros(D)
        for j, row in enumerate(samples):
            for a in range(D):
                rhs[a] += row[a] * X[i][m + j]
        beta = np.linalg.solve(G, rhs)
        errs = []
        for j, row in enumerate(samples):
            errs.append(X[i][m + j] - sum(beta[a] * row[a] for a in range(D)))
        mean = sum(errs) / len(errs)
        out.append(sum((e - mean) ** 2 for e in errs) / (len(errs) - 1))
    return out


def lsxgc_reference_oracle(X, s: int, cfg: AnalysisConfig | None = None) -> np.ndarray:
    """Same contract as :func:`lsxgc.core.lsxgc_source`, computed naively."""
    cfg = cfg or AnalysisConfig()
    X = as_matrix(X).tolist()
    N, T = len(X), len(X[0])
    p, m = cfg.p, cfg.m
    if T < m + m * (p + 1) + 2:
        raise TooFewSamples("too few samples for the reference fit")
    if cfg.standardize:
        X = _zscore(X)
    everyone = list(range(N))
    others = [i for i in everyone if i != s]

    mu, W = _top_axes(X, p)
    Z = _project(X, mu, W, everyone)
    var_with = _residual_variances(Z + [X[s]], X, m, cfg.ridge)

    if cfg.refit_pca:
        sub = [X[i] for i in others]
        mu_s, W_s = _top_axes(sub, p)
        Z_wo = _project(sub, mu_s, W_s, list(range(len(others))))
    else:
        Z_wo = _project(X, mu, W[:, others], others)
    var_without = _residual_variances(Z_wo, X, m, cfg.ridge)

    f = np.zeros(N)
    for t in others:
        if var_with[t] < 1e-15 or var_without[t] < 1e-15:
            raise ZeroResidualVariance(t)
        ratio = var_with[t] / var_without[t] if cfg.literal_ratio else var_without[t] / var_with[t]
        f[t] = math.log(ratio)
    return f
