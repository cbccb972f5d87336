"""Ensemble estimators with standard errors, each paired with its closed-form target.

All estimators treat paths as the independent unit. Within a path every
increment shares one mixture scalar L, so anything pooled along time gets
its standard error from per-path (or per-group) statistics.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats as sps

from .model import increment_correlation, moment
from .mlf import mittag_leffler_neg
from .sampler import PathEnsemble

MIN_PATHS_VARIANCE = 100
MIN_KS_SAMPLES = 50
MIN_CHAR_SAMPLES = 1000
HURST_GROUPS = 20


@dataclass
class EstimateReport:
    point_estimate: float
    std_error: float
    n_samples: int
    target: float
    z_score: float
    check: str = ""

    @classmethod
    def build(cls, estimate, se, n, target, check=""):
        z = (estimate - target) / se if se > 0 else (0.0 if estimate == target else math.inf)
        return cls(float(estimate), float(se), int(n), float(target), float(z), check)

    def to_dict(self) -> dict:
        return asdict(self)

    def as_row(self) -> dict:
        return {"check": self.check, "estimate": self.point_estimate, "se": self.std_error,
                "target": self.target, "z": self.z_score}


@dataclass
class CharFnEstimate:
    re: float
    im: float
    re_se: float
    im_se: float
    n_samples: int


def _jackknife_variance(x: np.ndarray):
    """Unbiased variance along axis 0 and its leave-one-out jackknife SE."""
    n = x.shape[0]
    xc = x - x.mean(axis=0)
    s1 = xc.sum(axis=0)
    s2 = (xc * xc).sum(axis=0)
    var = (s2 - s1 * s1 / n) / (n - 1)
    m = (s1 - xc) / (n - 1)
    loo = (s2 - xc * xc - (n - 1) * m * m) / (n - 2)
    se = np.sqrt((n - 1) / n * ((loo - loo.mean(axis=0)) ** 2).sum(axis=0))
    return var, se


def empirical_variance_curve(ensemble: PathEnsemble) -> list[EstimateReport]:
    """Sample variance at every grid time t > 0 against 2 t^alpha / Gamma(beta + 1)."""
    if ensemble.n_paths < MIN_PATHS_VARIANCE:
        raise ValueError(f"need at least {MIN_PATHS_VARIANCE} paths, got {ensemble.n_paths}")
    var, se = _jackknife_variance(ensemble.paths[:, 1:])
    out = []
    for t, v, s in zip(ensemble.times[1:], var, se):
        target = moment(ensemble.params, 2, t)
        out.append(EstimateReport.build(v, s, ensemble.n_paths, target, f"variance[t={float(t)!r}]"))
    return out


def _log_indices(n_steps, n_points):
    idx = np.unique(np.round(np.geomspace(1, n_steps, n_points)).astype(int))
    return idx


def estimate_hurst(ensemble: PathEnsemble, n_points: int = 24) -> EstimateReport:
    """Half the OLS slope of log sample variance against log t.

    Times are log-spaced grid indices. The standard error comes from a
    delete-one-group jackknife over paths; the regression residuals alone
    would ignore that all variances are computed from the same paths.
    """
    idx = _log_indices(ensemble.grid.n_steps, n_points)
    t = ensemble.times[idx]
    if idx.size < 3:
        raise ValueError(f"need >= 3 distinct positive times, got {idx.size}")
    if t[-1] / t[0] < 10.0 * (1 - 1e-12):
        raise ValueError("times must span at least one decade")
    x = np.log(t)
    xc = x - x.mean()
    sxx = float(xc @ xc)

    def slope(rows):
        v = rows[:, idx].var(axis=0, ddof=1)
        if np.any(v <= 0):
            raise ValueError("zero sample variance; regression is ill-conditioned")
        return float(xc @ np.log(v)) / sxx

    paths = ensemble.paths
    h = slope(paths) / 2.0
    n = ensemble.n_paths
    groups = min(HURST_GROUPS, n)
    if groups >= 2:
        bounds = np.linspace(0, n, groups + 1).astype(int)
        keep = np.ones(n, dtype=bool)
        loo = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            keep[lo:hi] = False
            loo.append(slope(paths[keep]) / 2.0)
            keep[lo:hi] = True
        loo = np.asarray(loo)
        se = math.sqrt((groups - 1) / groups * float(((loo - loo.mean()) ** 2).sum()))
    else:
        se = math.nan
    return EstimateReport.build(h, se, n, ensemble.params.hurst, "hurst")


def increment_autocorrelation(ensemble: PathEnsemble, lag: int = 1) -> EstimateReport:
    """Pooled lag correlation of increments (mean known to be zero).

    rho = mean(X_i X_{i+lag}) / mean(X_i^2) over paths and time; the SE is the
    delta-method SE of this ratio of per-path means.
    """
    if lag < 1 or int(lag) != lag:
        raise ValueError("lag must be a positive integer")
    n = ensemble.grid.n_steps
    if n < lag + 10:
        raise ValueError(f"need n_steps >= lag + 10, got n_steps={n}, lag={lag}")
    x = ensemble.increments()
    a = (x[:, :-lag] * x[:, lag:]).mean(axis=1)
    b = (x * x).mean(axis=1)
    rho = a.mean() / b.mean()
    lin = (a - rho * b) / b.mean()
    p = x.shape[0]
    se = float(lin.std(ddof=1) / math.sqrt(p)) if p > 1 else math.nan
    target = increment_correlation(ensemble.params.alpha, lag)
    return EstimateReport.build(rho, se, p, target, f"autocorrelation[lag={lag}]")


def _grid_index(ensemble, t):
    k = t / ensemble.grid.dt
    i = int(round(k))
    if abs(k - i) > 1e-9 * max(1.0, abs(k)) or not 0 <= i <= ensemble.grid.n_steps:
        raise ValueError(f"time {t!r} is not a grid node")
    return i


def window_increments(ensemble: PathEnsemble, window) -> np.ndarray:
    """B(t1) - B(t0) on every path for window = (t0, t1)."""
    i0, i1 = (_grid_index(ensemble, t) for t in window)
    if i1 <= i0:
        raise ValueError("window must have t1 > t0")
    return ensemble.paths[:, i1] - ensemble.paths[:, i0]


def ks_pvalue(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov p-value."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    if min(a.size, b.size) < MIN_KS_SAMPLES:
        raise ValueError(f"need >= {MIN_KS_SAMPLES} samples per group")
    return float(sps.ks_2samp(a, b).pvalue)


def stationarity_test(ensemble: PathEnsemble, window_a, window_b) -> float:
    """KS p-value for increments over two windows of equal duration.

    One increment per path per window, never pooled along time. Both samples
    come from the same paths, so identical windows give p = 1.
    """
    ia = [_grid_index(ensemble, t) for t in window_a]
    ib = [_grid_index(ensemble, t) for t in window_b]
    if ia[1] - ia[0] != ib[1] - ib[0]:
        raise ValueError("windows must have equal duration")
    if ia != ib and min(ia[1], ib[1]) > max(ia[0], ib[0]):
        raise ValueError("windows must be disjoint (or identical)")
    return ks_pvalue(window_increments(ensemble, window_a), window_increments(ensemble, window_b))


def empirical_char_fn(samples, y: float) -> CharFnEstimate:
    """Sample means of cos(yX) and sin(yX) with their standard errors."""
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < MIN_CHAR_SAMPLES:
        raise ValueError(f"need >= {MIN_CHAR_SAMPLES} samples, got {n}")
    if y == 0:
        return CharFnEstimate(1.0, 0.0, 0.0, 0.0, n)
    c = np.cos(y * x)
    s = np.sin(y * x)
    return CharFnEstimate(float(c.mean()), float(s.mean()),
                          float(c.std(ddof=1) / math.sqrt(n)), float(s.std(ddof=1) / math.sqrt(n)), n)


def char_fn_report(ensemble: PathEnsemble, y: float, t: float) -> EstimateReport:
    est = empirical_char_fn(ensemble.paths[:, _grid_index(ensemble, t)], y)
    p = ensemble.params
    target = float(mittag_leffler_neg(p.beta, (p.scale * y) ** 2 * t**p.alpha))
    return EstimateReport.build(est.re, est.re_se, est.n_samples, target, f"charfn[y={float(y)!r},t={float(t)!r}]")


def standard_suite(ensemble: PathEnsemble, max_variance_points: int = 16) -> list[EstimateReport]:
    """Variance curve (log-thinned), Hurst, lag-1 correlation and a few char-fn points."""
    reports = empirical_variance_curve(ensemble)
    if len(reports) > max_variance_points:
        keep = _log_indices(len(reports), max_variance_points) - 1
        reports = [reports[i] for i in keep]
    n = ensemble.grid.n_steps
    t_end = float(ensemble.times[-1])
    if t_end / ensemble.grid.dt >= 10.0 and n >= 3:
        reports.append(estimate_hurst(ensemble))
    if n >= 11:
        reports.append(increment_autocorrelation(ensemble, 1))
    if ensemble.n_paths >= MIN_CHAR_SAMPLES:
        for y in (0.5, 1.0):
            reports.append(char_fn_report(ensemble, y, t_end))
    return reports
