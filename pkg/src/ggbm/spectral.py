"""Quadrature checks for the alpha-inner product and its Laguerre basis.

    (f, g)_alpha = C(alpha) int_R conj(f~) g~ |x|^(1 - alpha) dx

Nothing here is used by the simulators; the functions exist so the basis,
the norm identities and the Hermite reduction can be verified numerically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import AccuracyWarning, NumericalError
from .model import c_alpha

LAGUERRE_N_MAX = 64
QUAD_RTOL = 1e-10


def laguerre_poly(n: int, gamma_idx: float, x):
    """L_n^gamma(x) by the forward three-term recurrence."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    if not gamma_idx > -1.0:
        raise ValueError(f"gamma_idx must exceed -1, got {gamma_idx!r}")
    if n > LAGUERRE_N_MAX:
        warnings.warn(f"n={n} is above the certified range n <= {LAGUERRE_N_MAX}",
                      AccuracyWarning, stacklevel=2)
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return float(prev) if x.ndim == 0 else prev
    cur = 1.0 + gamma_idx - x
    for k in range(1, int(n)):
        prev, cur = cur, ((2 * k + 1 + gamma_idx - x) * cur - (k + gamma_idx) * prev) / (k + 1)
    return float(cur) if x.ndim == 0 else cur


def laguerre_norm_sq(n: int, gamma_idx: float) -> float:
    """Gamma(n + gamma + 1) / Gamma(n + 1)."""
    return math.exp(special.gammaln(n + gamma_idx + 1.0) - special.gammaln(n + 1.0))


def laguerre_orthogonality_check(n: int, m: int, gamma_idx: float) -> float:
    """int_0^inf x^gamma e^-x L_n L_m dx by Gauss-Laguerre (exact for these degrees)."""
    if max(n, m) > 24:
        raise ValueError("orthogonality check is certified for n, m <= 24")
    nodes, weights = special.roots_genlaguerre(n + m + 2, gamma_idx)
    return float(weights @ (laguerre_poly(n, gamma_idx, nodes) * laguerre_poly(m, gamma_idx, nodes)))


def basis_const(alpha: float, k: int, odd: bool) -> float:
    """a_{alpha,k} (even index) or b_{alpha,k} (odd index)."""
    shift = 2.0 if odd else 1.0
    log_sq = special.gammaln(k + 1.0) - math.log(c_alpha(alpha)) - special.gammaln(k + shift - alpha / 2.0)
    return math.exp(0.5 * log_sq)


def basis_fn_hat(n: int, alpha: float, x):
    """Fourier-side basis function with global index n.

    n = 2k:   a_k exp(-x^2/2) L_k^(-alpha/2)(x^2)
    n = 2k+1: b_k exp(-x^2/2) x L_k^(1-alpha/2)(x^2)
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    c_alpha(alpha)
    x = np.asarray(x, dtype=float)
    k, odd = divmod(int(n), 2)
    x2 = x * x
    env = np.exp(-x2 / 2.0)
    if odd:
        out = basis_const(alpha, k, True) * env * x * laguerre_poly(k, 1.0 - alpha / 2.0, x2)
    else:
        out = basis_const(alpha, k, False) * env * laguerre_poly(k, -alpha / 2.0, x2)
    return float(out) if out.ndim == 0 else out


def hermite_fn(n: int, x):
    """Normalized Hermite function h_n(x), built by the normalized recurrence."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    x = np.asarray(x, dtype=float)
    prev = np.pi**-0.25 * np.exp(-x * x / 2.0)
    if n == 0:
        return float(prev) if x.ndim == 0 else prev
    cur = math.sqrt(2.0) * x * prev
    for k in range(1, int(n)):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
    return float(cur) if x.ndim == 0 else cur


def hermite_from_laguerre(n: int, x):
    """H_n(x) rebuilt from Laguerre polynomials of x^2 (even and odd branches)."""
    x = np.asarray(x, dtype=float)
    k, odd = divmod(int(n), 2)
    sign = -1.0 if k % 2 else 1.0
    fact = math.factorial(k)
    if odd:
        return sign * 2.0 ** (2 * k + 1) * fact * x * laguerre_poly(k, 0.5, x * x)
    return sign * 2.0 ** (2 * k) * fact * laguerre_poly(k, -0.5, x * x)


@dataclass(frozen=True)
class AlphaInnerProductSpec:
    """Rule for int_R |x|^(1-alpha) f(x) dx with f ~ exp(-x^2) * polynomial.

    Each half line is mapped by u = x^2, which turns the weight into
    u^(-alpha/2) / 2; generalized Gauss-Laguerre then absorbs both the
    origin singularity and the Gaussian envelope. Exact for polynomial
    degree < 2 * n_nodes in u.
    """
    alpha: float
    n_nodes: int = 48
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        c_alpha(self.alpha)
        u, w = special.roots_genlaguerre(self.n_nodes, -self.alpha / 2.0)
        object.__setattr__(self, "nodes", u)
        object.__setattr__(self, "weights", w)

    def integrate(self, f) -> float:
        r = np.sqrt(self.nodes)
        vals = (f(r) + f(-r)) * np.exp(self.nodes)
        return 0.5 * float(self.weights @ vals)

    def inner(self, f_hat, g_hat) -> float:
        return c_alpha(self.alpha) * self.integrate(lambda x: f_hat(x) * g_hat(x))


def alpha_gram(alpha: float, n_max: int = 12) -> np.ndarray:
    """Gram matrix of the first n_max + 1 basis functions under (., .)_alpha."""
    rule = AlphaInnerProductSpec(alpha)
    r = np.sqrt(rule.nodes)
    env = np.exp(rule.nodes)
    pos = np.array([basis_fn_hat(n, alpha, r) for n in range(n_max + 1)])
    neg = np.array([basis_fn_hat(n, alpha, -r) for n in range(n_max + 1)])
    g = 0.5 * c_alpha(alpha) * ((pos * rule.weights * env) @ pos.T + (neg * rule.weights * env) @ neg.T)
    return g


def _one_minus_cos_moment(t: float, p: float):
    """int_0^inf (1 - cos(t x)) x^p dx for -3 < p < -1, with its error estimate.

    [0, a]: 1 - cos = 2 sin^2(tx/2), smooth after pulling out x^(p+2), which
    QUADPACK takes as an algebraic end-point weight.
    [a, inf): int x^p analytic, the cosine part by QAWF.
    """
    a = math.pi / t
    half = lambda x: 0.5 * t * x  # noqa: E731

    def smooth(x):
        if x == 0.0:
            return 0.5 * t * t
        s = math.sin(half(x))
        return 2.0 * s * s / (x * x)

    head, e1 = integrate.quad(smooth, 0.0, a, weight="alg", wvar=(p + 2.0, 0.0),
                              epsabs=0.0, epsrel=1e-13, limit=200)
    power = a ** (p + 1.0) / -(p + 1.0)
    osc, e2 = integrate.quad(lambda x: x**p, a, np.inf, weight="cos", wvar=t,
                             epsabs=1e-13 * power, limlst=200)
    return head + power - osc, e1 + e2


def _checked(value, err, what):
    if not (math.isfinite(value) and err <= QUAD_RTOL * abs(value)):
        raise NumericalError(f"{what}: quadrature error estimate {err:.2e} on value {value:.6g}")
    return value


def deconvolution_norm_check(alpha: float, gamma_exp: float, t: float) -> float:
    """||g_{alpha,gamma,t}||_alpha^2 by quadrature; equals t^gamma in exact arithmetic.

    g~ = sqrt(C(gamma)/C(alpha)) 1~_[0,t) (ix)^((alpha-gamma)/2), so the
    integrand C(alpha) |g~|^2 |x|^(1-alpha) collapses to
    C(gamma) (1 - cos tx) / (pi x^2) |x|^(1-gamma).
    """
    if not t > 0:
        raise ValueError("t must be positive")
    ca, cg = c_alpha(alpha), c_alpha(gamma_exp)
    # the two alpha powers cancel; kept explicit so the exponent reads off the formula
    p = (1.0 - alpha) + (alpha - gamma_exp) - 2.0
    val, err = _one_minus_cos_moment(t, p)
    scale = ca * (cg / ca) * 2.0 / math.pi  # even integrand, |1~|^2 = (1 - cos tx) / (pi x^2)
    return _checked(scale * val, scale * err, "deconvolution norm")


def indicator_norm_quad(alpha: float, t: float) -> float:
    """||1_[0,t)||_alpha^2 by raw quadrature (the closed form is t^alpha)."""
    return deconvolution_norm_check(alpha, alpha, t)
