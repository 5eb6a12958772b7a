"""Dense linear-algebra building blocks shared by all estimators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .data import TimeSeriesEnsemble, as_matrix
from .errors import (
    DimensionMismatch,
    InvalidComponentCount,
    NonFiniteInput,
    TooFewSamples,
    ZeroVarianceSeries,
)

__all__ = [
    "PcaModel",
    "AffineModel",
    "standardize",
    "pca_fit",
    "pca_transform",
    "fit_affine",
    "residual_variance",
    "nested_residual_variances",
]

# singular values below RANK_TOL * sigma_max are treated as zero
RANK_TOL = 1e-10


def standardize(ensemble):
    """Z-score every row (mean 0, unbiased variance 1).

    Returns the same type it was given: a :class:`TimeSeriesEnsemble` in,
    an ensemble out; an array in, an array out.

    Raises
    ------
    ZeroVarianceSeries
        If a row is constant.
    """
    X = as_matrix(ensemble)
    if X.shape[1] < 2:
        raise TooFewSamples("standardization needs T >= 2")
    centered = X - X.mean(axis=1, keepdims=True)
    sd = np.sqrt(np.sum(centered**2, axis=1) / (X.shape[1] - 1))
    scale = np.max(np.abs(X), axis=1)
    for i in range(X.shape[0]):
        if not sd[i] > 1e-14 * max(scale[i], 1.0):
            raise ZeroVarianceSeries(i)
    Z = centered / sd[:, None]
    # second pass removes the O(eps) residue of the first
    Z = Z - Z.mean(axis=1, keepdims=True)
    Z = Z / np.sqrt(np.sum(Z**2, axis=1) / (X.shape[1] - 1))[:, None]
    if isinstance(ensemble, TimeSeriesEnsemble):
        return ensemble.with_data(Z)
    return Z


@dataclass(frozen=True)
class PcaModel:
    """Principal axes of an ``N x T`` ensemble (columns are samples).

    Attributes
    ----------
    mean : ndarray, shape (N,)
    W : ndarray, shape (p, N)
        Orthonormal rows; the largest-magnitude entry of each row is positive.
    explained_variance : ndarray, shape (p,)
        Sample variance along each axis, descending.
    """

    mean: np.ndarray
    W: np.ndarray
    explained_variance: np.ndarray

    @property
    def n_components(self) -> int:
        return self.W.shape[0]


def pca_fit(X, p: int) -> PcaModel:
    """Fit the top-``p`` principal axes by thin SVD of the centered data."""
    X = as_matrix(X)
    N, T = X.shape
    if not 1 <= p <= min(N, T):
        raise InvalidComponentCount(f"p={p} outside [1, min(N, T)={min(N, T)}]")
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput("PCA input contains NaN or Inf")
    mean = X.mean(axis=1)
    U, sv, _ = scipy.linalg.svd(X - mean[:, None], full_matrices=False)
    W = U[:, :p].T.copy()
    pivot = np.argmax(np.abs(W), axis=1)
    signs = np.sign(W[np.arange(p), pivot])
    signs[signs == 0] = 1.0
    W *= signs[:, None]
    var = sv[:p] ** 2 / max(T - 1, 1)
    return PcaModel(mean=mean, W=W, explained_variance=var)


def pca_transform(model: PcaModel, X) -> np.ndarray:
    """Project ``X`` onto the model axes: ``W @ (X - mean)``."""
    X = as_matrix(X)
    if X.shape[0] != model.W.shape[1]:
        raise DimensionMismatch(
            f"model has {model.W.shape[1]} nodes, data has {X.shape[0]}"
        )
    return model.W @ (X - model.mean[:, None])


@dataclass(frozen=True)
class AffineModel:
    """``targets(t) ~ A @ design(t) + b``."""

    A: np.ndarray
    b: np.ndarray

    def predict(self, design) -> np.ndarray:
        return self.A @ np.asarray(design, dtype=float) + self.b[:, None]

    def residuals(self, design, targets) -> np.ndarray:
        return np.asarray(targets, dtype=float) - self.predict(design)


def fit_affine(design, targets, ridge: float = 0.0) -> AffineModel:
    """Least-squares affine map from ``design`` (D x S) to ``targets`` (N x S).

    Minimizes ``sum_t |targets(t) - A design(t) - b|^2 + ridge |A|_F^2``.
    The bias is never penalized. With ``ridge=0`` and a rank-deficient
    design the minimum-norm ``A`` is returned.
    """
    D = np.asarray(design, dtype=float)
    Y = np.asarray(targets, dtype=float)
    if D.ndim == 1:
        D = D[None, :]
    if Y.ndim == 1:
        Y = Y[None, :]
    if D.shape[1] != Y.shape[1]:
        raise DimensionMismatch(
            f"design has {D.shape[1]} samples, targets have {Y.shape[1]}"
        )
    if not (np.all(np.isfinite(D)) and np.all(np.isfinite(Y))):
        raise NonFiniteInput("affine fit input contains NaN or Inf")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    d_mean = D.mean(axis=1)
    y_mean = Y.mean(axis=1)
    Dc = (D - d_mean[:, None]).T
    Yc = (Y - y_mean[:, None]).T
    if ridge > 0:
        n_feat = Dc.shape[1]
        Dc = np.vstack([Dc, np.sqrt(ridge) * np.eye(n_feat)])
        Yc = np.vstack([Yc, np.zeros((n_feat, Yc.shape[1]))])
    if Dc.shape[1] == 0:
        A = np.zeros((Y.shape[0], 0))
    else:
        coef, *_ = scipy.linalg.lstsq(Dc, Yc, cond=RANK_TOL, lapack_driver="gelsy")
        A = coef.T
    b = y_mean - A @ d_mean
    return AffineModel(A=A, b=b)


def residual_variance(errors) -> float | np.ndarray:
    """Unbiased (``S - 1``) sample variance along the last axis."""
    e = np.asarray(errors, dtype=float)
    S = e.shape[-1]
    if S < 2:
        raise TooFewSamples("variance needs at least two samples")
    v = np.var(e, axis=-1, ddof=1)
    return float(v) if e.ndim == 1 else v


def nested_residual_variances(design, targets, n_reduced: int):
    """Residual variances of two nested ridge-free affine fits.

    The reduced model uses the first ``n_reduced`` rows of ``design``, the
    full model all of them; one thin QR of the centered design serves both.
    ``design`` may be a single ``D x S`` matrix or a stack ``B x D x S`` of
    designs sharing the same targets. Rank-deficient designs fall back to
    :func:`fit_affine`, which returns the minimum-norm fit.

    Returns
    -------
    var_reduced, var_full : ndarray, shape (N,) or (B, N)
    """
    D = np.asarray(design, dtype=float)
    Y = np.asarray(targets, dtype=float)
    single = D.ndim == 2
    if single:
        D = D[None]
    if D.shape[2] != Y.shape[1]:
        raise DimensionMismatch(f"design has {D.shape[2]} samples, targets have {Y.shape[1]}")
    S = Y.shape[1]
    Dc = np.swapaxes(D - D.mean(axis=2, keepdims=True), 1, 2)
    Yc = (Y - Y.mean(axis=1, keepdims=True)).T
    Q, R = np.linalg.qr(Dc)
    coef = np.swapaxes(Q, 1, 2) @ Yc
    rss_full = np.sum((Yc - Q @ coef) ** 2, axis=1)
    rss_small = np.sum((Yc - Q[:, :, :n_reduced] @ coef[:, :n_reduced]) ** 2, axis=1)
    diag = np.abs(np.diagonal(R, axis1=1, axis2=2))
    for b in np.flatnonzero(diag.min(axis=1) <= RANK_TOL * diag.max(axis=1)):
        small, full = D[b, :n_reduced], D[b]
        rss_small[b] = np.sum(fit_affine(small, Y).residuals(small, Y) ** 2, axis=1)
        rss_full[b] = np.sum(fit_affine(full, Y).residuals(full, Y) ** 2, axis=1)
    v_small, v_full = rss_small / (S - 1), rss_full / (S - 1)
    return (v_small[0], v_full[0]) if single else (v_small, v_full)
