"""Directed network inference for multivariate time-series.

Large-scale Extended Granger Causality (:func:`lsxgc_matrix`), three
baselines (:func:`granger_matrix`, :func:`te_matrix`, :func:`mi_matrix`),
a synthetic fMRI-like benchmark generator and an AUROC/Wilcoxon harness.
"""

from .baselines import granger_matrix, mi_matrix, te_matrix
from .core import LagDesign, lag_embed, lsxgc_matrix, lsxgc_source
from .data import (
    AnalysisConfig,
    CausalityMatrix,
    GroundTruthGraph,
    TimeSeriesEnsemble,
    load_ensemble_csv,
    load_graph,
    load_matrix,
    save_ensemble_csv,
    save_matrix,
)
from .evaluation import (
    BenchmarkReport,
    MethodResult,
    auroc,
    estimate,
    run_benchmark,
    summary_stats,
    wilcoxon_signed_rank,
)
from .knn import KnnEstimatorConfig, knn_mutual_information, transfer_entropy
from .numerics import PcaModel, AffineModel, fit_affine, pca_fit, pca_transform, residual_variance, standardize
from .reference import lsxgc_reference_oracle
from .simulate import Realization, SimulationConfig, simulate_dataset

__version__ = "0.1.0"
