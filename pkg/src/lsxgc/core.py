"""Large-scale Extended Granger Causality (lsXGC).

For every candidate source ``x_s`` the ensemble is compressed to its first
``p`` principal components, the compressed series are augmented with the raw
``x_s`` and an affine VAR(m) predicts every node one step ahead. The same
prediction is repeated with ``x_s`` removed, both from the augmentation and
from the projection (its loading column is deleted). The index for ``s -> t``
is the log-ratio of the two residual variances of target ``t``::

    f[s, t] = log(var(e_without_s[t]) / var(e_with_s[t]))

Positive values mean ``x_s`` improves the prediction of ``x_t``. Set
``AnalysisConfig(literal_ratio=True)`` to get the reciprocal ratio instead.

Because only ``m * (p + 1)`` regressors enter each fit, the regressions stay
well determined when the number of nodes far exceeds the number of samples.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import AnalysisConfig, CausalityMatrix, TimeSeriesEnsemble, as_matrix
from .errors import InvalidComponentCount, TooFewSamples, ZeroResidualVariance
from .numerics import (
    PcaModel,
    fit_affine,
    nested_residual_variances,
    pca_fit,
    pca_transform,
    residual_variance,
    standardize,
)

__all__ = ["LagDesign", "lag_embed", "lsxgc_source", "lsxgc_matrix"]

# residual variance below this means the target is (almost) deterministic
ZERO_VAR = 1e-15


@dataclass(frozen=True)
class LagDesign:
    """Lagged regressors for one-step-ahead prediction.

    ``matrix[:, j]`` stacks ``Y[:, t-1], Y[:, t-2], ..., Y[:, t-m]`` for the
    1-based time ``t = m + 1 + j``. ``valid_range`` is ``(m + 1, T)``.
    """

    matrix: np.ndarray
    valid_range: tuple[int, int]


def lag_embed(Y, m: int) -> LagDesign:
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[None, :]
    q, T = Y.shape
    if m < 1:
        raise ValueError("lag order must be >= 1")
    if T <= m:
        raise TooFewSamples(f"need T > m, got T={T}, m={m}")
    blocks = [Y[:, m - lag : T - lag] for lag in range(1, m + 1)]
    return LagDesign(np.vstack(blocks), (m + 1, T))


def _prepare(X, cfg: AnalysisConfig) -> np.ndarray:
    X = as_matrix(X)
    if cfg.standardize:
        X = standardize(X)
    N, T = X.shape
    need = cfg.m + cfg.m * (cfg.p + 1) + 2
    if T < need:
        raise TooFewSamples(f"lsXGC with p={cfg.p}, m={cfg.m} needs T >= {need}, got {T}")
    if cfg.p > N - 1:
        raise InvalidComponentCount(f"p={cfg.p} must be < N={N}")
    return X


def _batched_lags(Y: np.ndarray, m: int) -> np.ndarray:
    """lag_embed applied to every ``Y[b]`` of a ``B x q x T`` stack."""
    T = Y.shape[2]
    return np.concatenate([Y[:, :, m - lag : T - lag] for lag in range(1, m + 1)], axis=1)


def _variances_nested(X, model, sources, cfg):
    """Both residual variances for a batch of sources via one stacked QR.

    With the loading column deleted, ``Z = Z_without_s + W[:, s] x_s``, so
    lags of ``(Z, x_s)`` and of ``(Z_without_s, x_s)`` span the same space
    and the two models are nested.
    """
    m = cfg.m
    Xc = X - model.mean[:, None]
    Z = model.W @ Xc
    src = Xc[sources][:, None, :]
    Z_wo = Z[None] - model.W.T[sources][:, :, None] * src
    reduced = _batched_lags(Z_wo, m)
    design = np.concatenate([reduced, _batched_lags(src, m)], axis=1)
    return nested_residual_variances(design, X[:, m:], reduced.shape[1])


def _variances_separate(X, model, s, cfg):
    m = cfg.m
    targets = X[:, m:]
    keep = np.arange(X.shape[0]) != s
    augmented = lag_embed(np.vstack([pca_transform(model, X), X[s]]), m).matrix
    fit = fit_affine(augmented, targets, cfg.ridge)
    var_with = residual_variance(fit.residuals(augmented, targets))
    if cfg.refit_pca:
        Z_wo = pca_transform(pca_fit(X[keep], cfg.p), X[keep])
    else:
        Z_wo = model.W[:, keep] @ (X[keep] - model.mean[keep, None])
    reduced = lag_embed(Z_wo, m).matrix
    fit = fit_affine(reduced, targets, cfg.ridge)
    return residual_variance(fit.residuals(reduced, targets)), var_with


def _source_rows(X: np.ndarray, model: PcaModel, sources, cfg: AnalysisConfig) -> np.ndarray:
    sources = np.asarray(sources, dtype=int)
    if cfg.refit_pca or cfg.ridge > 0:
        pairs = [_variances_separate(X, model, s, cfg) for s in sources]
        var_without = np.vstack([p[0] for p in pairs])
        var_with = np.vstack([p[1] for p in pairs])
    else:
        var_without, var_with = _variances_nested(X, model, sources, cfg)
    rows = np.arange(len(sources))
    bad = np.minimum(var_with, var_without) < ZERO_VAR
    bad[rows, sources] = False
    if bad.any():
        raise ZeroResidualVariance(int(np.argwhere(bad)[0, 1]))
    with np.errstate(divide="ignore", invalid="ignore"):
        if cfg.literal_ratio:
            f = np.log(var_with / var_without)
        else:
            f = np.log(var_without / var_with)
    f[rows, sources] = 0.0
    return f


def lsxgc_source(X, s: int, cfg: AnalysisConfig | None = None) -> np.ndarray:
    """lsXGC indices ``f[s -> t]`` for one source and every target.

    Parameters
    ----------
    X : TimeSeriesEnsemble or array_like, shape (N, T)
    s : int
        Source node index.
    cfg : AnalysisConfig, optional

    Returns
    -------
    ndarray, shape (N,)
        Entry ``s`` is 0.
    """
    cfg = cfg or AnalysisConfig()
    X = _prepare(X, cfg)
    if not 0 <= s < X.shape[0]:
        raise IndexError(f"source index {s} out of range")
    return _source_rows(X, pca_fit(X, cfg.p), [s], cfg)[0]


def lsxgc_matrix(X, cfg: AnalysisConfig | None = None, jobs: int = 1) -> CausalityMatrix:
    """Full lsXGC score matrix; row ``s`` holds the influence of ``x_s``.

    Sources are independent; ``jobs > 1`` splits them into chunks handled by a
    thread pool. The result does not depend on ``jobs``.
    """
    cfg = cfg or AnalysisConfig()
    names = X.node_names if isinstance(X, TimeSeriesEnsemble) else ()
    Xs = _prepare(X, cfg)
    model = pca_fit(Xs, cfg.p)
    N = Xs.shape[0]
    if jobs > 1:
        chunks = np.array_split(np.arange(N), jobs)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda c: _source_rows(Xs, model, c, cfg), chunks))
        scores = np.vstack(rows)
    else:
        scores = _source_rows(Xs, model, np.arange(N), cfg)
    return CausalityMatrix(scores, "lsxgc", names)
