import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsxgc.data import CausalityMatrix, GroundTruthGraph
from lsxgc.errors import (
    AllDifferencesZero,
    DegenerateGroundTruth,
    DimensionMismatch,
    EmptyInput,
    InvalidParams,
    TooFewSamples,
)
from lsxgc.evaluation import (
    auroc,
    parse_methods,
    run_benchmark,
    summary_stats,
    wilcoxon_signed_rank,
)
from lsxgc.simulate import SimulationConfig, simulate_dataset


def brute_auroc(S, G):
    n = S.shape[0]
    pos, neg = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                (pos if G[i, j] else neg).append(S[i, j])
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def random_instance(rng, n=6, ties=False):
    G = (rng.random((n, n)) < 0.3).astype(int)
    np.fill_diagonal(G, 0)
    G[0, 1], G[1, 0] = 1, 0
    S = rng.integers(0, 4, (n, n)).astype(float) if ties else rng.standard_normal((n, n))
    return S, G


def enum_p(d):
    """Two-sided p from all 2^n sign flips of the observed |d|."""
    d = np.asarray(d, dtype=float)
    from scipy.stats import rankdata

    ranks = rankdata(np.abs(d))
    w = ranks[d > 0].sum()
    stats = [sum(r for r, s in zip(ranks, signs) if s)
             for signs in itertools.product([0, 1], repeat=len(d))]
    stats = np.array(stats)
    lo = np.mean(stats <= w + 1e-9)
    hi = np.mean(stats >= w - 1e-9)
    return min(1.0, 2 * min(lo, hi))


# ------------------------------------------------------------------ AUROC


def test_auroc_examples():
    G = np.zeros((5, 5), int)
    G[0, 1] = G[2, 3] = G[4, 0] = 1
    assert auroc(G.astype(float), G) == 1.0
    assert auroc(1.0 - G, G) == 0.0
    assert auroc(np.ones((5, 5)), G) == 0.5


def test_auroc_ignores_diagonal():
    G = np.zeros((4, 4), int)
    G[0, 1] = 1
    S = G.astype(float)
    S[np.diag_indices(4)] = 100.0
    assert auroc(S, G) == 1.0


def test_auroc_brute_force():
    rng = np.random.default_rng(0)
    for i in range(300):
        S, G = random_instance(rng, ties=i % 2 == 0)
        assert auroc(S, G) == brute_auroc(S, G)


def test_auroc_accepts_domain_types():
    G = np.zeros((3, 3), int)
    G[0, 1] = 1
    S = np.arange(9.0).reshape(3, 3)
    assert auroc(CausalityMatrix(S, "x"), GroundTruthGraph(G)) == auroc(S, G)


def test_auroc_errors():
    with pytest.raises(DegenerateGroundTruth):
        auroc(np.zeros((3, 3)), np.zeros((3, 3), int))
    full = 1 - np.eye(3, dtype=int)
    with pytest.raises(DegenerateGroundTruth):
        auroc(np.zeros((3, 3)), full)
    with pytest.raises(DimensionMismatch):
        auroc(np.zeros((3, 3)), np.zeros((4, 4), int))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_auroc_invariances(seed):
    rng = np.random.default_rng(seed)
    S, G = random_instance(rng, n=7, ties=seed % 3 == 0)
    a = auroc(S, G)
    assert auroc(np.exp(S) * 3 + 1, G) == a
    assert auroc(-S, G) + a == pytest.approx(1.0, abs=1e-12)


# --------------------------------------------------------------- Wilcoxon


def test_wilcoxon_all_positive_n6():
    assert wilcoxon_signed_rank(np.arange(1, 7), np.zeros(6)) == pytest.approx(0.03125, abs=1e-15)


def test_wilcoxon_errors():
    with pytest.raises(AllDifferencesZero):
        wilcoxon_signed_rank([1, 2, 3, 4, 5], [1, 2, 3, 4, 5])
    with pytest.raises(TooFewSamples):
        wilcoxon_signed_rank([1, 2, 3, 4, 5], [0, 0, 0, 5, 5])
    with pytest.raises(DimensionMismatch):
        wilcoxon_signed_rank(np.zeros((2, 3)), np.ones((2, 3)))


def test_wilcoxon_matches_enumeration():
    rng = np.random.default_rng(1)
    for n in range(5, 11):
        for trial in range(15):
            if trial % 3 == 0:
                d = rng.integers(-3, 4, n).astype(float)  # ties and zeros
                if np.count_nonzero(d) < 5:
                    continue
            else:
                d = rng.standard_normal(n) + 0.3
            nz = d[d != 0]
            assert wilcoxon_signed_rank(d, np.zeros(n)) == pytest.approx(enum_p(nz), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(5, 60), st.integers(0, 2**32 - 1))
def test_wilcoxon_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(n), rng.standard_normal(n)
    p = wilcoxon_signed_rank(a, b)
    assert p == wilcoxon_signed_rank(b, a)
    assert 0 < p <= 1


def test_wilcoxon_normal_branch_close_to_exact_tail():
    # n = 30 all-positive: exact p = 2 / 2^30; normal approximation is conservative
    p = wilcoxon_signed_rank(np.arange(1, 31), np.zeros(30))
    assert 0 < p < 1e-5


def test_wilcoxon_calibration():
    rng = np.random.default_rng(2)
    rejections = 0
    for _ in range(1000):
        a, b = rng.standard_normal(50), rng.standard_normal(50)
        rejections += wilcoxon_signed_rank(a, b) < 0.05
    assert 0.03 <= rejections / 1000 <= 0.07


# ---------------------------------------------------------------- summary


def test_summary_hand_example():
    s = summary_stats([1, 2, 3, 4, 5])
    assert (s["median"], s["q1"], s["q3"]) == (3, 2, 4)
    assert s["whisker_lo"] == 1 and s["whisker_hi"] == 5
    assert s["mean"] == 3


def test_summary_constant():
    s = summary_stats(np.full(7, 0.4))
    assert set(s.values()) == {0.4, 0.0} and s["std"] == 0.0


def test_summary_whiskers_clip_outliers():
    s = summary_stats([1, 2, 3, 4, 100])
    assert s["whisker_hi"] == 4 + 1.5 * 2


def sorted_quantile(v, q):
    v = np.sort(v)
    pos = q * (len(v) - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, len(v) - 1)
    return v[lo] + (pos - lo) * (v[hi] - v[lo])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=60))
def test_summary_quantile_oracle(values):
    s = summary_stats(values)
    for key, q in (("q1", 0.25), ("median", 0.5), ("q3", 0.75)):
        assert s[key] == pytest.approx(sorted_quantile(np.array(values), q), abs=1e-9)
    assert min(values) <= s["whisker_lo"] <= s["q1"] + 1e-9
    assert s["q3"] - 1e-9 <= s["whisker_hi"] <= max(values)


def test_summary_empty():
    with pytest.raises(EmptyInput):
        summary_stats([])


# -------------------------------------------------------------- benchmark


def test_parse_methods():
    assert parse_methods("all") == ["lsxgc", "gc", "te", "mi"]
    assert parse_methods("lsxgc, gc") == ["lsxgc", "gc"]
    with pytest.raises(InvalidParams):
        parse_methods("foo")
    with pytest.raises(InvalidParams):
        parse_methods("")


@pytest.fixture(scope="module")
def small_dataset():
    return simulate_dataset(SimulationConfig(n_realizations=6, seed=3))


def test_single_method_single_realization(small_dataset):
    rep = run_benchmark(small_dataset[:1], "lsxgc")
    assert len(rep.results) == 1
    assert len(rep.method("lsxgc").auroc_per_realization) == 1
    assert rep.wilcoxon() == {}


def test_report_schema_and_determinism(small_dataset):
    rep = run_benchmark(small_dataset, "lsxgc,gc,mi")
    again = run_benchmark(small_dataset, "lsxgc,gc,mi", jobs=3)
    for a, b in zip(rep.results, again.results):
        np.testing.assert_array_equal(a.auroc_per_realization, b.auroc_per_realization)
    d = json.loads(rep.to_json())
    assert [m["name"] for m in d["methods"]] == ["lsxgc", "gc", "mi"]
    for m in d["methods"]:
        assert {"name", "auroc", "elapsed_s", "summary"} <= set(m)
        assert all(0 <= x <= 1 for x in m["auroc"])
        assert m["elapsed_s"] >= 0
    assert set(d["wilcoxon_p"]) == {"lsxgc_vs_gc", "lsxgc_vs_mi", "gc_vs_mi"}
    P = rep.pairwise_p
    assert np.allclose(P, P.T, equal_nan=True)
    assert d["config"]["analysis"]["p"] == 1
    medians = [r.summary["median"] for r in rep.ranked()]
    assert medians == sorted(medians, reverse=True)
    assert "AUROC" in rep.table()


def test_method_failure_is_recorded():
    data = simulate_dataset(SimulationConfig(n_nodes=40, t_samples=50, n_realizations=2,
                                             edge_density=0.05))
    rep = run_benchmark(data, "lsxgc,gc")
    assert "UnderdeterminedSystem" in rep.method("gc").error
    assert len(rep.method("lsxgc").auroc_per_realization) == 2


def test_empty_dataset():
    with pytest.raises(EmptyInput):
        run_benchmark([], "lsxgc")
