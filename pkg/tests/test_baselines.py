import numpy as np
import pytest
from scipy.stats import spearmanr

from conftest import coupled_pair
from lsxgc.baselines import granger_matrix, mi_matrix, te_matrix
from lsxgc.data import AnalysisConfig
from lsxgc.errors import UnderdeterminedSystem
from lsxgc.knn import ksg_mi
from lsxgc.numerics import standardize


def simulate_var(rng, A, t, burn=200):
    n = A.shape[0]
    x = np.zeros(n)
    out = np.empty((n, t + burn))
    for i in range(t + burn):
        x = A @ x + rng.standard_normal(n)
        out[:, i] = x
    return out[:, burn:]


def ols_rss_var(y, cols):
    D = np.column_stack([np.ones(len(y))] + cols)
    beta, *_ = np.linalg.lstsq(D, y, rcond=None)
    return np.var(y - D @ beta, ddof=1)


class TestGranger:
    def test_white_noise(self, rng):
        G = granger_matrix(rng.standard_normal((4, 1000))).scores
        assert np.all(np.abs(G) < 0.05)

    def test_chain_against_explicit_fits(self, rng):
        X = standardize(coupled_pair(rng, 2000))
        G = granger_matrix(X).scores
        x1, x2 = X
        y = x2[2:]
        restricted = [x2[1:-1], x2[:-2]]
        full = restricted + [x1[1:-1], x1[:-2]]
        oracle = np.log(ols_rss_var(y, restricted) / ols_rss_var(y, full))
        assert G[0, 1] == pytest.approx(oracle, abs=1e-10)
        assert G[0, 1] == pytest.approx(np.log(1 + 0.8**2), abs=0.05)
        assert abs(G[1, 0]) < 0.02

    def test_conditional_on_third_node(self, rng):
        A = np.array([[0.5, 0.0, 0.0], [0.7, 0.3, 0.0], [0.0, 0.7, 0.3]])
        X = simulate_var(rng, A, 3000)
        G = granger_matrix(X).scores
        # 1 -> 3 only passes through 2; conditioning on 2 removes it
        assert G[0, 1] > 0.2 and G[1, 2] > 0.2
        assert abs(G[0, 2]) < 0.02

    def test_zero_coefficient_converges(self, rng):
        A = np.array([[0.5, 0.0, 0.0], [0.6, 0.4, 0.0], [0.3, 0.0, 0.2]])
        G = granger_matrix(simulate_var(rng, A, 5000)).scores
        for s, t in [(1, 0), (2, 0), (1, 2), (2, 1)]:
            assert abs(G[s, t]) < 0.02

    def test_underdetermined(self, rng):
        with pytest.raises(UnderdeterminedSystem) as err:
            granger_matrix(rng.standard_normal((100, 150)))
        assert (err.value.n_nodes, err.value.lag, err.value.n_samples) == (100, 2, 150)

    def test_boundary(self, rng):
        # T - m must exceed N*m + 1
        with pytest.raises(UnderdeterminedSystem):
            granger_matrix(rng.standard_normal((4, 11)))
        assert granger_matrix(rng.standard_normal((4, 12))).scores.shape == (4, 4)

    def test_ridge_path(self, rng):
        X = coupled_pair(rng, 500)
        a = granger_matrix(X).scores
        b = granger_matrix(X, cfg=AnalysisConfig(ridge=1e-9)).scores
        assert np.allclose(a, b, atol=1e-8)

    def test_jobs(self, rng):
        X = rng.standard_normal((6, 300))
        assert np.array_equal(granger_matrix(X).scores, granger_matrix(X, jobs=3).scores)


class TestMiMatrix:
    def test_symmetric(self, rng):
        X = rng.standard_normal((5, 300))
        X[1] += X[0]
        M = mi_matrix(X).scores
        assert np.array_equal(M, M.T)
        assert M[0, 1] > 0.2

    def test_pair(self, rng):
        X = rng.standard_normal((2, 400))
        X[1] += 0.5 * X[0]
        cfg = AnalysisConfig(jitter=0.0)
        M = mi_matrix(X, cfg).scores
        Z = standardize(X)
        assert M[0, 1] == M[1, 0] == ksg_mi(Z[0], Z[1])

    def test_lagged(self, rng):
        X = coupled_pair(rng, 1000)
        M = mi_matrix(X, AnalysisConfig(mi_lag=1)).scores
        assert M[0, 1] > 0.15 and abs(M[1, 0]) < 0.05

    def test_jobs(self, rng):
        X = rng.standard_normal((4, 200))
        assert np.array_equal(mi_matrix(X).scores, mi_matrix(X, jobs=3).scores)


class TestTeMatrix:
    def test_chain_direction(self, rng):
        T = te_matrix(coupled_pair(rng, 2000)).scores
        assert T[0, 1] > 0.15 and T[0, 1] > 5 * abs(T[1, 0])

    def test_white_noise(self, rng):
        T = te_matrix(rng.standard_normal((4, 2000))).scores
        assert np.all(np.abs(T) < 0.05)

    def test_permutation_equivariance(self, rng):
        X = rng.standard_normal((4, 400))
        X[2, 1:] += 0.7 * X[0, :-1]
        perm = np.array([2, 0, 3, 1])
        T = te_matrix(X).scores
        Tp = te_matrix(X[perm]).scores
        assert np.allclose(Tp, T[np.ix_(perm, perm)], atol=1e-9)

    def test_jobs(self, rng):
        X = rng.standard_normal((4, 300))
        assert np.array_equal(te_matrix(X).scores, te_matrix(X, jobs=2).scores)

    def test_rank_agreement_with_granger(self, rng):
        A = np.diag([0.3, 0.3, 0.3, 0.3])
        for (s, t), c in zip([(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (0, 3)],
                             [0.15, 0.3, 0.45, 0.6, 0.75, 0.9]):
            A[t, s] = c
        A *= 0.6
        X = simulate_var(rng, A, 2000)
        te = te_matrix(X).scores
        gc = granger_matrix(X, m=1).scores
        edges = np.nonzero(A.T * (1 - np.eye(4)))
        rho = spearmanr(te[edges], gc[edges]).statistic
        assert rho > 0.8
