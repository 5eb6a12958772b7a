"""Kraskov-Stoegbauer-Grassberger k-nearest-neighbour estimators.

Both estimators use the max-norm. Neighbour counts in the marginal spaces
are strict (distance < eps), and each point is excluded from its own count.
Neighbour search is exact (``scipy.spatial.cKDTree``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .errors import DegenerateDistances, InvalidParams, TooFewSamples

__all__ = [
    "KnnEstimatorConfig",
    "jitter",
    "knn_mutual_information",
    "transfer_entropy",
    "ksg_mi",
    "ksg_cmi",
]


@dataclass(frozen=True)
class KnnEstimatorConfig:
    """``k`` neighbours; ``noise_jitter`` is the tie-breaking noise amplitude
    relative to each series' standard deviation; ``seed`` drives that noise."""

    k: int = 4
    noise_jitter: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParams("k must be >= 1")
        if self.noise_jitter < 0:
            raise InvalidParams("noise_jitter must be non-negative")


def jitter(x, amplitude: float, seed) -> np.ndarray:
    """Add uniform noise in ``[-amplitude, amplitude] * std(x)``.

    ``seed`` is anything :class:`numpy.random.SeedSequence` accepts, so a
    node or pair index can be folded in for order-independent streams.
    """
    x = np.asarray(x, dtype=float)
    if amplitude == 0:
        return x.copy()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    scale = np.std(x) or 1.0
    return x + amplitude * scale * rng.uniform(-1.0, 1.0, size=x.shape)


def _column(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[:, None] if v.ndim == 1 else v


def _strict_counts(points: np.ndarray, radii: np.ndarray, tree: cKDTree | None = None):
    """Number of other points strictly closer than ``radii[i]`` to point i."""
    tree = tree or cKDTree(points)
    r = np.nextafter(radii, 0)
    return tree.query_ball_point(points, r, p=np.inf, return_length=True) - 1


def _kth_distance(points: np.ndarray, k: int) -> np.ndarray:
    d, _ = cKDTree(points).query(points, k=k + 1, p=np.inf)
    eps = d[:, k]
    if np.any(eps <= 0):
        raise DegenerateDistances("coincident points; k-th neighbour distance is zero")
    return eps


def ksg_mi(a, b, k: int = 4) -> float:
    """KSG estimator 1 on already de-tied samples, in nats."""
    a, b = _column(a), _column(b)
    S = a.shape[0]
    if S <= k + 1:
        raise TooFewSamples(f"need more than k + 1 = {k + 1} samples, got {S}")
    eps = _kth_distance(np.hstack([a, b]), k)
    na = _strict_counts(a, eps)
    nb = _strict_counts(b, eps)
    return float(digamma(k) + digamma(S) - np.mean(digamma(na + 1) + digamma(nb + 1)))


def ksg_cmi(x, y, z, k: int = 4, trees=None) -> float:
    """Conditional MI ``I(x; y | z)`` with the Frenzel-Pompe correction.

    ``trees`` may carry prebuilt ``(tree_xz, tree_yz, tree_z)``; any entry
    left as ``None`` is built here.
    """
    x, y, z = _column(x), _column(y), _column(z)
    S = x.shape[0]
    if S <= k + 1:
        raise TooFewSamples(f"need more than k + 1 = {k + 1} samples, got {S}")
    eps = _kth_distance(np.hstack([x, y, z]), k)
    t_xz, t_yz, t_z = trees or (None, None, None)
    xz = np.hstack([x, z])
    yz = np.hstack([y, z])
    n_xz = _strict_counts(xz, eps, t_xz)
    n_yz = _strict_counts(yz, eps, t_yz)
    n_z = _strict_counts(z, eps, t_z)
    return float(
        digamma(k) - np.mean(digamma(n_xz + 1) + digamma(n_yz + 1) - digamma(n_z + 1))
    )


def _check_spread(*series):
    for v in series:
        if np.ptp(v) == 0:
            raise DegenerateDistances("constant input series")


def knn_mutual_information(a, b, cfg: KnnEstimatorConfig | None = None) -> float:
    """Mutual information between two scalar series (nats).

    Independent inputs can give slightly negative values; they are not
    clamped.
    """
    cfg = cfg or KnnEstimatorConfig()
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError("a and b must have the same length")
    if a.size <= cfg.k + 1:
        raise TooFewSamples(f"need more than k + 1 = {cfg.k + 1} samples, got {a.size}")
    _check_spread(a, b)
    a = jitter(a, cfg.noise_jitter, [cfg.seed, 0])
    b = jitter(b, cfg.noise_jitter, [cfg.seed, 1])
    return ksg_mi(a, b, cfg.k)


def transfer_entropy(source, target, cfg: KnnEstimatorConfig | None = None) -> float:
    """Transfer entropy ``source -> target`` with embedding 1 and lag 1 (nats).

    Computed as ``I(target(t); source(t-1) | target(t-1))``.
    """
    cfg = cfg or KnnEstimatorConfig()
    source = np.asarray(source, dtype=float).ravel()
    target = np.asarray(target, dtype=float).ravel()
    if source.shape != target.shape:
        raise ValueError("source and target must have the same length")
    if source.size <= cfg.k + 2:
        raise TooFewSamples(f"need T > k + 2 = {cfg.k + 2}, got {source.size}")
    _check_spread(source, target)
    source = jitter(source, cfg.noise_jitter, [cfg.seed, 0])
    target = jitter(target, cfg.noise_jitter, [cfg.seed, 1])
    return ksg_cmi(target[1:], source[:-1], target[:-1], cfg.k)
