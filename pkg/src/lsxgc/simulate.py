"""Synthetic fMRI-like networks with known directed ground truth.

Pipeline per realization::

    random sparse digraph -> stable VAR(1) neural activity (fine time step)
    -> double-gamma HRF convolution -> decimation to the TR grid
    -> white measurement noise at a target SNR -> z-scoring

Realization ``i`` draws from its own RNG seeded by ``(cfg.seed, i)``, so a
dataset is a pure function of its :class:`SimulationConfig` whatever the
generation order.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import gamma

from .data import (
    GroundTruthGraph,
    TimeSeriesEnsemble,
    load_ensemble_csv,
    load_graph,
    save_ensemble_csv,
    save_matrix,
)
from .errors import (
    IncompatibleSamplingRates,
    InvalidParams,
    NumericalBlowup,
    StabilityNotReached,
    ZeroPowerSignal,
)
from .numerics import standardize

__all__ = [
    "SimulationConfig",
    "Realization",
    "generate_graph",
    "var_matrix",
    "simulate_neural",
    "hrf_kernel",
    "convolve_subsample",
    "add_noise_snr",
    "realization_seed",
    "simulate_realization",
    "simulate_dataset",
    "write_dataset",
    "load_dataset",
]

MAX_ATTEMPTS = 1000
MAX_SPECTRAL_RADIUS = 0.95
HRF_LENGTH_S = 32.0


@dataclass(frozen=True)
class SimulationConfig:
    """Generator settings. Times are in seconds.

    ``neural_decay`` is the per-step self-coupling of the neural VAR(1) and
    ``coupling_scale`` multiplies the edge weights drawn from
    ``coupling_strength``. ``burn_in`` neural steps are discarded.
    ``snr_db=inf`` switches measurement noise off.
    """

    n_nodes: int = 15
    n_realizations: int = 50
    t_samples: int = 200
    edge_density: float = 0.15
    coupling_strength: tuple = (0.3, 0.9)
    snr_db: float = 20.0
    hrf_peak_s: float = 6.0
    hrf_undershoot_s: float = 16.0
    neural_dt_s: float = 0.05
    tr_s: float = 3.0
    neural_decay: float = 0.9
    coupling_scale: float = 0.04
    burn_in: int = 500
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coupling_strength", tuple(float(c) for c in self.coupling_strength))
        lo, hi = self.coupling_strength
        if not 0 < self.edge_density < 1:
            raise InvalidParams("edge_density must lie in (0, 1)")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise InvalidParams("snr_db must be a number or +inf")
        if self.t_samples < 50:
            raise InvalidParams("t_samples must be >= 50")
        if self.n_nodes < 2 or self.n_realizations < 1:
            raise InvalidParams("need n_nodes >= 2 and n_realizations >= 1")
        if not 0 <= lo <= hi:
            raise InvalidParams("coupling_strength must be an ordered non-negative range")
        if self.neural_dt_s <= 0 or self.tr_s <= 0:
            raise InvalidParams("time steps must be positive")

    @property
    def decimation(self) -> int:
        return _decimation(self.neural_dt_s, self.tr_s)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["coupling_strength"] = list(self.coupling_strength)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationConfig":
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - fields
        if unknown:
            raise InvalidParams(f"unknown simulation keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class Realization:
    ensemble: TimeSeriesEnsemble
    graph: GroundTruthGraph
    seed_used: int


def var_matrix(weights, decay: float = 0.9, scale: float = 0.04) -> np.ndarray:
    """Transition matrix of the neural VAR(1): ``decay * I + scale * weights.T``.

    ``weights[s, t]`` is the coupling of s onto t, so row t of the result
    collects the inputs of node t.
    """
    w = np.asarray(weights, dtype=float)
    return decay * np.eye(w.shape[0]) + scale * w.T


def generate_graph(n: int, density: float, strength_range=(0.3, 0.9), rng=None,
                   decay: float = 0.9, scale: float = 0.04) -> GroundTruthGraph:
    """Directed Erdos-Renyi graph with positive weights and stable dynamics.

    Graphs without edges, or whose VAR transition matrix has spectral radius
    >= 0.95, are redrawn.

    Raises
    ------
    StabilityNotReached
        After 1000 unsuccessful draws.
    """
    rng = np.random.default_rng() if rng is None else rng
    lo, hi = strength_range
    off = ~np.eye(n, dtype=bool)
    for _ in range(MAX_ATTEMPTS):
        adj = (rng.random((n, n)) < density) & off
        weights = np.where(adj, rng.uniform(lo, hi, size=(n, n)), 0.0)
        if not adj.any():
            continue
        radius = np.max(np.abs(np.linalg.eigvals(var_matrix(weights, decay, scale))))
        if radius < MAX_SPECTRAL_RADIUS:
            return GroundTruthGraph(adj.astype(np.int8), weights)
    raise StabilityNotReached(
        f"no stable graph in {MAX_ATTEMPTS} draws (n={n}, density={density})"
    )


def simulate_neural(graph, steps: int, dt: float = 0.05, rng=None, decay: float = 0.9,
                    scale: float = 0.04, burn_in: int = 500, x0=None) -> np.ndarray:
    """Run ``x(t) = A x(t-1) + eta(t)`` with standard normal ``eta``.

    ``graph`` is a :class:`GroundTruthGraph` (its weights are used) or a raw
    weight matrix. ``dt`` is carried for bookkeeping only; the dynamics are
    defined per step. Returns ``N x steps`` after dropping ``burn_in`` steps.
    """
    rng = np.random.default_rng() if rng is None else rng
    if isinstance(graph, GroundTruthGraph):
        weights = graph.weights if graph.weights is not None else graph.adjacency
    else:
        weights = graph
    A = var_matrix(weights, decay, scale)
    n = A.shape[0]
    total = burn_in + steps
    noise = rng.standard_normal((total, n))
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    out = np.empty((total, n))
    for i in range(total):
        x = A @ x + noise[i]
        out[i] = x
    out = out[burn_in:].T
    if not np.all(np.isfinite(out)) or np.max(np.abs(out)) > 1e6:
        raise NumericalBlowup("neural trajectory diverged")
    return out


def hrf_kernel(peak_s: float = 6.0, undershoot_s: float = 16.0, dt: float = 0.05,
               ratio: float = 1 / 6) -> np.ndarray:
    """Double-gamma haemodynamic response sampled every ``dt`` up to 32 s.

    Each lobe is a unit-scale gamma density whose mode sits at the given
    time; the undershoot is weighted by ``ratio``. Normalized to unit sum.
    """
    if dt <= 0 or peak_s <= 0 or undershoot_s <= peak_s:
        raise InvalidParams("need dt > 0 and 0 < peak_s < undershoot_s")
    t = np.arange(0.0, HRF_LENGTH_S, dt)
    h = gamma.pdf(t, peak_s + 1.0) - ratio * gamma.pdf(t, undershoot_s + 1.0)
    return h / h.sum()


def _decimation(dt: float, tr: float) -> int:
    q = tr / dt
    step = int(round(q))
    if step < 1 or abs(q - step) > 1e-9 * q:
        raise IncompatibleSamplingRates(f"tr={tr} is not an integer multiple of dt={dt}")
    return step


def convolve_subsample(neural, kernel, dt: float, tr: float) -> np.ndarray:
    """Causal per-node convolution followed by keeping every ``tr/dt``-th sample."""
    step = _decimation(dt, tr)
    neural = np.atleast_2d(np.asarray(neural, dtype=float))
    kernel = np.asarray(kernel, dtype=float)
    n_steps = neural.shape[1]
    smooth = np.vstack([np.convolve(row, kernel)[:n_steps] for row in neural])
    return smooth[:, ::step]


def add_noise_snr(signals, snr_db: float, rng=None) -> np.ndarray:
    """Add white Gaussian noise with per-node power ``P_signal / 10**(snr_db/10)``.

    ``P_signal`` is the node's variance (mean removed). ``snr_db=inf`` returns
    a copy of the input.
    """
    signals = np.atleast_2d(np.asarray(signals, dtype=float))
    if snr_db == math.inf:
        return signals.copy()
    rng = np.random.default_rng() if rng is None else rng
    power = np.var(signals, axis=1)
    if np.any(power <= 0):
        raise ZeroPowerSignal(f"node {int(np.argmin(power))} has zero power")
    sd = np.sqrt(power / 10 ** (snr_db / 10))
    return signals + sd[:, None] * rng.standard_normal(signals.shape)


def realization_seed(base_seed: int, index: int) -> int:
    """64-bit seed for realization ``index``, independent of generation order."""
    state = np.random.SeedSequence([int(base_seed), int(index)]).generate_state(1, np.uint64)
    return int(state[0])


def simulate_realization(cfg: SimulationConfig, index: int) -> Realization:
    seed = realization_seed(cfg.seed, index)
    rng = np.random.default_rng(seed)
    graph = generate_graph(cfg.n_nodes, cfg.edge_density, cfg.coupling_strength, rng,
                           cfg.neural_decay, cfg.coupling_scale)
    kernel = hrf_kernel(cfg.hrf_peak_s, cfg.hrf_undershoot_s, cfg.neural_dt_s)
    step = cfg.decimation
    # extra kernel-length prefix so the retained BOLD has no zero-padding edge
    pad = int(math.ceil(len(kernel) / step)) * step
    neural = simulate_neural(graph, cfg.t_samples * step + pad, cfg.neural_dt_s, rng,
                             cfg.neural_decay, cfg.coupling_scale, cfg.burn_in)
    bold = convolve_subsample(neural, kernel, cfg.neural_dt_s, cfg.tr_s)[:, pad // step:]
    noisy = add_noise_snr(bold, cfg.snr_db, rng)
    ensemble = TimeSeriesEnsemble(standardize(noisy), (), cfg.tr_s)
    return Realization(ensemble, graph, seed)


def simulate_dataset(cfg: SimulationConfig | None = None, jobs: int = 1) -> list[Realization]:
    """All ``cfg.n_realizations`` realizations, in index order."""
    cfg = cfg or SimulationConfig()
    indices = range(cfg.n_realizations)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda i: simulate_realization(cfg, i), indices))
    return [simulate_realization(cfg, i) for i in indices]


def write_dataset(realizations, outdir, cfg: SimulationConfig | None = None) -> list[str]:
    """Write ``real_<i>_ts.csv``, ``real_<i>_gt.csv`` and ``manifest.json``.

    Returns the paths written.
    """
    os.makedirs(outdir, exist_ok=True)
    written = []
    entries = []
    for i, real in enumerate(realizations):
        ts = os.path.join(outdir, f"real_{i}_ts.csv")
        gt = os.path.join(outdir, f"real_{i}_gt.csv")
        save_ensemble_csv(real.ensemble, ts)
        save_matrix(real.graph, gt, "csv")
        written += [ts, gt]
        entries.append({"index": i, "seed": str(real.seed_used),
                        "timeseries": os.path.basename(ts), "ground_truth": os.path.basename(gt)})
    manifest = {
        "config": cfg.to_dict() if cfg is not None else None,
        "realizations": entries,
    }
    path = os.path.join(outdir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    written.append(path)
    return written


def load_dataset(outdir) -> list[Realization]:
    """Read a directory written by :func:`write_dataset`.

    Without a manifest, every ``real_<i>_ts.csv`` with a matching
    ``real_<i>_gt.csv`` is loaded in index order.
    """
    manifest_path = os.path.join(outdir, "manifest.json")
    if os.path.exists(manifest_path):
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        entries = [(e["timeseries"], e["ground_truth"], int(e.get("seed", -1)))
                   for e in manifest["realizations"]]
        tr = (manifest.get("config") or {}).get("tr_s")
    else:
        idx = sorted(int(f[5:-7]) for f in os.listdir(outdir)
                     if f.startswith("real_") and f.endswith("_ts.csv"))
        entries = [(f"real_{i}_ts.csv", f"real_{i}_gt.csv", -1) for i in idx]
        tr = None
    out = []
    for ts, gt, seed in entries:
        ens = load_ensemble_csv(os.path.join(outdir, ts), "rows-are-time", tr)
        graph = load_graph(os.path.join(outdir, gt))
        out.append(Realization(ens, graph, seed))
    return out
