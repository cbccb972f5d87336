"""Closed-form layer for the generalized grey Brownian motion B_{alpha,beta}.

Normalization follows the "standard" convention E B(1)^2 = 2 / Gamma(beta+1);
``GgbmParams.scale`` multiplies the whole process (``unit_variance_scale``
gives the value that makes E B(1)^2 = 1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .mlf import gamma, mittag_leffler_neg

VALID_RECTANGLE = "(alpha, beta) must lie in (0, 2) x (0, 1]"


@dataclass(frozen=True)
class GgbmParams:
    alpha: float
    beta: float
    scale: float = 1.0

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (0.0 < a < 2.0) or not (0.0 < b <= 1.0):
            raise ValueError(f"{VALID_RECTANGLE}; got alpha={self.alpha!r}, beta={self.beta!r}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def hurst(self) -> float:
        return self.alpha / 2.0

    @property
    def variance_factor(self) -> float:
        """E B(1)^2 = 2 scale^2 / Gamma(beta + 1)."""
        return 2.0 * self.scale**2 / gamma(self.beta + 1.0)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "scale": self.scale}


def unit_variance_scale(alpha: float, beta: float) -> float:
    """Scale for which E B(1)^2 = 1."""
    GgbmParams(alpha, beta)
    return math.sqrt(gamma(beta + 1.0) / 2.0)


class RegimeKind(enum.Enum):
    SLOW = "slow"
    NORMAL = "normal"
    FAST = "fast"


class IncrementCorrelation(enum.Enum):
    NEGATIVE = "negative"
    ZERO = "zero"
    POSITIVE = "positive"


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    increment_correlation: IncrementCorrelation
    long_range_dependence: bool


def _check_alpha(alpha):
    if not (0.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (0, 2), got {alpha!r}")


def c_alpha(alpha: float) -> float:
    """C(alpha) = Gamma(alpha + 1) sin(pi alpha / 2)."""
    _check_alpha(alpha)
    return gamma(alpha + 1.0) * math.sin(math.pi * alpha / 2.0)


def indicator_norm_sq(alpha, t):
    """Squared alpha-norm of the indicator of [0, t): t**alpha."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    out = t**alpha
    return float(out) if out.ndim == 0 else out


def covariance(params: GgbmParams, t, s):
    """E B(t) B(s) = (t^a + s^a - |t - s|^a) / Gamma(beta + 1), times scale^2."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t < 0) or np.any(s < 0):
        raise ValueError("times must be non-negative")
    a = params.alpha
    out = (t**a + s**a - np.abs(t - s) ** a) * (params.scale**2 / gamma(params.beta + 1.0))
    return float(out) if out.ndim == 0 else out


def fgn_autocovariance(alpha, lags, dt=1.0):
    """Lag-k covariance of increments of the Gaussian core (variance 2 dt^alpha at k=0)."""
    k = np.abs(np.asarray(lags, dtype=float))
    out = dt**alpha * (np.abs(k + 1) ** alpha - 2 * k**alpha + np.abs(k - 1) ** alpha)
    return float(out) if out.ndim == 0 else out


def increment_correlation(alpha, lag):
    """Normalized lag correlation of the increments; holds for every beta."""
    return fgn_autocovariance(alpha, lag) / 2.0


def moment(params: GgbmParams, n: int, t: float) -> float:
    """E B(t)^n: zero for odd n, (2m)!/Gamma(beta m + 1) t^(alpha m) for n = 2m."""
    if n < 0 or int(n) != n:
        raise ValueError("moment order must be a non-negative integer")
    if t < 0:
        raise ValueError("t must be non-negative")
    n = int(n)
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    m = n // 2
    try:
        fact = float(math.factorial(n))
    except OverflowError:
        raise OverflowError(f"({n})! is not representable in double precision") from None
    value = fact / gamma(params.beta * m + 1.0) * (params.scale**2 * t**params.alpha) ** m
    if not math.isfinite(value):
        raise OverflowError(f"moment of order {n} overflows")
    return value


def char_increment(params: GgbmParams, y, t, s):
    """E exp(i y (B(t) - B(s))) = E_beta(-y^2 |t - s|^alpha)."""
    if np.any(np.asarray(t) < 0) or np.any(np.asarray(s) < 0):
        raise ValueError("times must be non-negative")
    y = np.asarray(y, dtype=float)
    arg = (params.scale * y) ** 2 * np.abs(np.asarray(t, float) - np.asarray(s, float)) ** params.alpha
    return mittag_leffler_neg(params.beta, arg)


class NotPositiveSemidefiniteError(ValueError):
    pass


def finite_dim_char(params: GgbmParams, times, theta, rtol=1e-12) -> float:
    """Joint characteristic function E exp(i sum_j theta_j B(t_j)).

    Equals E_beta(-q) with q = (1/2) theta' S theta and
    S_ij = t_i^a + t_j^a - |t_i - t_j|^a (the covariance without the Gamma factor).
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if times.shape != theta.shape or times.ndim != 1 or times.size == 0:
        raise ValueError("times and theta must be 1-d with equal, non-zero length")
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    a = params.alpha
    ta = times**a
    sig = ta[:, None] + ta[None, :] - np.abs(times[:, None] - times[None, :]) ** a
    q = 0.5 * params.scale**2 * float(theta @ sig @ theta)
    if q < 0:
        bound = rtol * params.scale**2 * float(np.abs(theta) @ np.abs(sig) @ np.abs(theta))
        if -q > bound:
            raise NotPositiveSemidefiniteError(
                f"quadratic form is negative ({q:.3e}); covariance not positive semidefinite"
            )
        q = 0.0
    return mittag_leffler_neg(params.beta, q)


def classify_regime(alpha: float) -> Regime:
    """Diffusion regime from alpha; exact comparison against 1."""
    _check_alpha(alpha)
    if alpha < 1.0:
        return Regime(RegimeKind.SLOW, IncrementCorrelation.NEGATIVE, False)
    if alpha == 1.0:
        return Regime(RegimeKind.NORMAL, IncrementCorrelation.ZERO, False)
    return Regime(RegimeKind.FAST, IncrementCorrelation.POSITIVE, True)
