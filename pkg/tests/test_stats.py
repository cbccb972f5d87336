import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ggbm import stats
from ggbm.model import GgbmParams
from ggbm.sampler import PathEnsemble, TimeGrid, sample_ggbm


def _ensemble(alpha, beta, n_steps, dt, n_paths, seed):
    return sample_ggbm(GgbmParams(alpha, beta), TimeGrid(n_steps, dt), n_paths, seed)


@pytest.fixture(scope="module")
def ens():
    return _ensemble(1.5, 0.75, 256, 1 / 128, 10_000, 2024)


# --- plumbing ----------------------------------------------------------------

@given(est=st.floats(-10, 10), se=st.floats(1e-6, 10), target=st.floats(-10, 10))
def test_report_z_invariant(est, se, target):
    r = stats.EstimateReport.build(est, se, 10, target, "x")
    assert r.z_score == pytest.approx((est - target) / se, rel=1e-12, abs=1e-12)
    assert r.as_row() == {"check": "x", "estimate": r.point_estimate, "se": se, "target": target, "z": r.z_score}
    assert r.to_dict()["n_samples"] == 10


def test_report_zero_se():
    assert stats.EstimateReport.build(1.0, 0.0, 5, 1.0).z_score == 0.0
    assert math.isinf(stats.EstimateReport.build(1.0, 0.0, 5, 2.0).z_score)


@settings(max_examples=20)
@given(n=st.integers(3, 40), seed=st.integers(0, 2**32))
def test_jackknife_matches_brute_force(n, seed):
    x = np.random.default_rng(seed).standard_normal((n, 3)) * [1, 5, 0.1]
    var, se = stats._jackknife_variance(x)
    loo = np.array([np.delete(x, i, axis=0).var(axis=0, ddof=1) for i in range(n)])
    np.testing.assert_allclose(var, x.var(axis=0, ddof=1), rtol=1e-12)
    brute = np.sqrt((n - 1) / n * ((loo - loo.mean(axis=0)) ** 2).sum(axis=0))
    np.testing.assert_allclose(se, brute, rtol=1e-8)


# --- variance ----------------------------------------------------------------

def test_variance_targets():
    e = _ensemble(1.0, 1.0, 4, 0.25, 200, 1)
    reps = stats.empirical_variance_curve(e)
    assert len(reps) == 4  # t = 0 excluded
    assert reps[-1].target == pytest.approx(2.0)
    assert reps[-1].check == "variance[t=1.0]"


def test_variance_target_example(ens):
    rep = stats.empirical_variance_curve(ens)[255]
    assert rep.check == "variance[t=2.0]"
    assert rep.target == pytest.approx(2 * 2**1.5 / math.gamma(1.75), rel=1e-14)
    assert rep.target == pytest.approx(6.155026545242346, rel=1e-14)


def test_variance_needs_paths():
    with pytest.raises(ValueError):
        stats.empirical_variance_curve(_ensemble(1, 1, 4, 0.1, 99, 0))


def test_variance_z_scores(ens):
    z = [r.z_score for r in stats.empirical_variance_curve(ens)]
    assert max(abs(v) for v in z) < 4


# --- Hurst -------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.6, 1.0])
def test_hurst_target(alpha):
    e = _ensemble(alpha, 0.7, 128, 0.01, 2000, 5)
    r = stats.estimate_hurst(e)
    assert r.target == alpha / 2
    assert abs(r.z_score) < 4
    assert r.std_error > 0


def test_hurst_target_is_beta_free():
    a = stats.estimate_hurst(_ensemble(1.2, 0.4, 128, 0.01, 4000, 11))
    b = stats.estimate_hurst(_ensemble(1.2, 1.0, 128, 0.01, 4000, 12))
    assert a.target == b.target
    assert abs(a.point_estimate - b.point_estimate) < 2 * math.hypot(a.std_error, b.std_error)


def test_hurst_preconditions():
    with pytest.raises(ValueError, match="decade"):
        stats.estimate_hurst(_ensemble(1, 1, 8, 0.1, 100, 0))
    with pytest.raises(ValueError, match="3 distinct"):
        stats.estimate_hurst(_ensemble(1, 1, 2, 0.1, 100, 0))


# --- autocorrelation ---------------------------------------------------------

@pytest.mark.parametrize("alpha, target", [(1.0, 0.0), (1.5, 0.41421), (0.5, -0.29289)])
def test_autocorrelation_targets(alpha, target):
    e = _ensemble(alpha, 0.6, 64, 0.1, 500, 9)
    r = stats.increment_autocorrelation(e, 1)
    assert r.target == pytest.approx(target, abs=1e-5)
    assert abs(r.z_score) < 4


def test_autocorrelation_z(ens):
    for lag in (1, 3):
        assert abs(stats.increment_autocorrelation(ens, lag).z_score) < 4


def test_autocorrelation_preconditions():
    e = _ensemble(1, 1, 10, 0.1, 10, 0)
    with pytest.raises(ValueError):
        stats.increment_autocorrelation(e, 1)
    with pytest.raises(ValueError):
        stats.increment_autocorrelation(_ensemble(1, 1, 20, 0.1, 10, 0), 0)


# --- stationarity ------------------------------------------------------------

def test_identical_windows_give_one():
    e = _ensemble(0.8, 0.8, 20, 0.25, 200, 3)
    assert stats.stationarity_test(e, (1.0, 2.0), (1.0, 2.0)) == 1.0


def test_window_validation():
    e = _ensemble(0.8, 0.8, 20, 0.25, 200, 3)
    with pytest.raises(ValueError, match="equal duration"):
        stats.stationarity_test(e, (0.0, 1.0), (2.0, 4.0))
    with pytest.raises(ValueError, match="disjoint"):
        stats.stationarity_test(e, (0.0, 1.0), (0.5, 1.5))
    with pytest.raises(ValueError, match="grid node"):
        stats.stationarity_test(e, (0.1, 1.1), (2.0, 3.0))
    with pytest.raises(ValueError):
        stats.window_increments(e, (1.0, 1.0))
    with pytest.raises(ValueError):
        stats.stationarity_test(_ensemble(1, 1, 20, 0.25, 49, 0), (0.0, 1.0), (4.0, 5.0))


def _ks_pass_rate(fn, runs=100):
    return sum(fn(seed) for seed in range(runs))


@pytest.mark.slow
def test_stationarity_calibration():
    def run(seed):
        e = _ensemble(0.8, 0.8, 20, 0.25, 1000, seed)
        return stats.stationarity_test(e, (0.0, 1.0), (4.0, 5.0)) > 0.01
    assert _ks_pass_rate(run) >= 98


@pytest.mark.slow
def test_duration_mismatch_is_detected():
    def run(seed):
        e = _ensemble(1.5, 0.75, 8, 0.25, 1000, 10_000 + seed)
        a = stats.window_increments(e, (0.0, 0.25))
        b = stats.window_increments(e, (1.0, 1.5))
        return stats.ks_pvalue(a, b) < 0.01
    assert _ks_pass_rate(run) >= 95


@pytest.mark.slow
@pytest.mark.parametrize("a", [2, 4])
def test_self_similarity_calibration(a):
    alpha = 1.3

    def run(seed):
        e = _ensemble(alpha, 0.6, 16, 0.25, 2000, 20_000 + seed)
        # disjoint path halves, so the two samples are independent
        x = e.paths[:1000, stats._grid_index(e, 1.0)]
        y = e.paths[1000:, stats._grid_index(e, float(a))] / a ** (alpha / 2)
        return stats.ks_pvalue(x, y) > 0.01
    assert _ks_pass_rate(run) >= 95


def test_ks_needs_samples():
    with pytest.raises(ValueError):
        stats.ks_pvalue(np.zeros(49), np.zeros(100))


# --- characteristic function -------------------------------------------------

def test_char_fn_zero():
    assert stats.empirical_char_fn(np.random.default_rng(0).standard_normal(1000), 0.0) == \
        stats.CharFnEstimate(1.0, 0.0, 0.0, 0.0, 1000)


def test_char_fn_needs_samples():
    with pytest.raises(ValueError):
        stats.empirical_char_fn(np.zeros(999), 1.0)


def test_char_fn_half_half():
    e = _ensemble(0.5, 0.5, 4, 0.25, 20_000, 8)
    r = stats.char_fn_report(e, 1.0, 1.0)
    assert r.target == pytest.approx(0.42758, abs=1e-5)
    assert abs(r.z_score) < 4
    est = stats.empirical_char_fn(e.paths[:, -1], 1.0)
    assert abs(est.im) < 4 * est.im_se


def test_standard_suite_rows(ens):
    rows = stats.standard_suite(ens)
    checks = [r.check for r in rows]
    assert sum(c.startswith("variance") for c in checks) <= 16
    assert "hurst" in checks and "autocorrelation[lag=1]" in checks
    assert sum(c.startswith("charfn") for c in checks) == 2
    assert all(abs(r.z_score) < 4 for r in rows)


def test_ensemble_roundtrip_keeps_params():
    e = _ensemble(1.1, 0.9, 5, 0.2, 100, 0)
    assert isinstance(e, PathEnsemble)
    assert e.params == GgbmParams(1.1, 0.9)
