import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from ggbm import spectral as sp
from ggbm.errors import AccuracyWarning
from ggbm.model import c_alpha


# --- Laguerre ----------------------------------------------------------------

def test_laguerre_low_orders():
    x = np.linspace(0, 7, 15)
    assert np.all(sp.laguerre_poly(0, 0.3, x) == 1.0)
    np.testing.assert_allclose(sp.laguerre_poly(1, 0.5, x), 1.5 - x, rtol=0, atol=1e-15)
    assert sp.laguerre_poly(1, 0.5, 2.0) == pytest.approx(-0.5, abs=1e-15)


@given(n=st.integers(0, 40), g=st.floats(-0.95, 3.0), x=st.floats(0, 30))
def test_laguerre_matches_scipy(n, g, x):
    ref = special.eval_genlaguerre(n, g, x)
    assert sp.laguerre_poly(n, g, x) == pytest.approx(ref, rel=1e-9, abs=1e-9 * max(1.0, abs(ref)))


@pytest.mark.parametrize("n, g", [(3, 0.0), (7, -0.4), (12, 1.5), (20, 0.7)])
def test_laguerre_ode_residual(n, g):
    # x L'' + (g + 1 - x) L' + n L = 0, derivatives by 7-point differences
    x = np.linspace(0.5, 6.0, 23)
    h = 1e-2
    f = lambda z: sp.laguerre_poly(n, g, z)  # noqa: E731
    c = [f(x + k * h) for k in range(-3, 4)]
    d1 = (-c[0] + 9 * c[1] - 45 * c[2] + 45 * c[4] - 9 * c[5] + c[6]) / (60 * h)
    d2 = (2 * c[0] - 27 * c[1] + 270 * c[2] - 490 * c[3] + 270 * c[4] - 27 * c[5] + 2 * c[6]) / (180 * h * h)
    res = x * d2 + (g + 1 - x) * d1 + n * c[3]
    assert np.max(np.abs(res)) <= 1e-9 * np.max(np.abs(c[3]))


def test_laguerre_validation_and_range_warning():
    with pytest.raises(ValueError):
        sp.laguerre_poly(-1, 0.0, 1.0)
    with pytest.raises(ValueError):
        sp.laguerre_poly(2, -1.0, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error", AccuracyWarning)
        with pytest.raises(AccuracyWarning):
            sp.laguerre_poly(65, 0.0, 1.0)
        sp.laguerre_poly(64, 0.0, 1.0)


@pytest.mark.parametrize("n, m, g, want", [
    (0, 0, 0.3, math.gamma(1.3)),
    (2, 3, -0.4, 0.0),
    (4, 4, 0.0, 1.0),
])
def test_orthogonality_examples(n, m, g, want):
    assert sp.laguerre_orthogonality_check(n, m, g) == pytest.approx(want, abs=1e-10)


@given(n=st.integers(0, 24), m=st.integers(0, 24), g=st.floats(-0.9, 2.0))
def test_orthogonality_property(n, m, g):
    v = sp.laguerre_orthogonality_check(n, m, g)
    norm = sp.laguerre_norm_sq(n, g)
    want = norm if n == m else 0.0
    assert abs(v - want) <= 1e-10 * max(1.0, norm, sp.laguerre_norm_sq(m, g))


def test_orthogonality_range_enforced():
    with pytest.raises(ValueError):
        sp.laguerre_orthogonality_check(25, 0, 0.0)


# --- basis -------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.6, 1.0, 1.4])
def test_gram_is_identity(alpha):
    g = sp.alpha_gram(alpha, 12)
    assert np.max(np.abs(g - np.eye(13))) <= 1e-8


@pytest.mark.parametrize("alpha", [0.3, 0.6, 1.0, 1.4, 1.9])
def test_first_basis_value_at_origin(alpha):
    want = (1 / (c_alpha(alpha) * math.gamma(1 - alpha / 2))) ** 0.5
    assert sp.basis_fn_hat(0, alpha, 0.0) == pytest.approx(want, rel=1e-14)
    assert sp.basis_const(alpha, 0, False) == pytest.approx(want, rel=1e-14)


def test_odd_basis_vanishes_at_origin():
    for n in (1, 3, 9):
        assert sp.basis_fn_hat(n, 0.8, 0.0) == 0.0


@pytest.mark.parametrize("n", range(13))
def test_unit_alpha_reduces_to_hermite(n):
    x = np.linspace(-4, 4, 81)
    a = sp.basis_fn_hat(n, 1.0, x)
    h = sp.hermite_fn(n, x)
    sign = np.sign(a @ h)
    assert np.max(np.abs(a - sign * h)) <= 1e-12 * np.max(np.abs(h))


@pytest.mark.parametrize("n", range(13))
def test_hermite_polynomials_from_laguerre(n):
    x = np.linspace(-4, 4, 81)
    ref = special.eval_hermite(n, x)
    got = sp.hermite_from_laguerre(n, x)
    assert np.max(np.abs(got - ref)) <= 1e-9 * np.max(np.abs(ref))


def test_basis_rejects_bad_input():
    with pytest.raises(ValueError):
        sp.basis_fn_hat(-1, 1.0, 0.0)
    with pytest.raises(ValueError):
        sp.basis_fn_hat(0, 2.0, 0.0)


# --- Hermite functions -------------------------------------------------------

def test_hermite_examples():
    assert sp.hermite_fn(0, 0.0) == pytest.approx(0.7511255444649425, rel=1e-15)
    for n in (1, 5, 33):
        assert sp.hermite_fn(n, 0.0) == 0.0


def test_hermite_against_scipy():
    x = np.linspace(-6, 6, 121)
    for n in range(20):
        ref = special.eval_hermite(n, x) * np.exp(-x * x / 2) / math.sqrt(2**n * math.factorial(n) * math.sqrt(math.pi))
        assert np.max(np.abs(sp.hermite_fn(n, x) - ref)) <= 1e-12


def test_hermite_orthonormal():
    x, w = special.roots_hermite(40)
    h = np.array([sp.hermite_fn(n, x) * np.exp(x * x / 2) for n in range(13)])
    assert np.max(np.abs((h * w) @ h.T - np.eye(13))) <= 1e-10


def test_hermite_high_order_finite():
    v = sp.hermite_fn(64, np.linspace(-12, 12, 101))
    assert np.all(np.isfinite(v)) and np.max(np.abs(v)) < 1


# --- alpha-inner product quadrature -----------------------------------------

@pytest.mark.parametrize("alpha", [0.4, 1.0, 1.7])
def test_inner_product_rule_against_adaptive_quadrature(alpha):
    rule = sp.AlphaInnerProductSpec(alpha)
    f = lambda x: np.exp(-x * x) * (1 + x + 3 * x**4)  # noqa: E731
    weighted = lambda x: abs(x) ** (1 - alpha) * f(x)  # noqa: E731
    # split at 1 as well so QUADPACK sees the origin singularity on a finite panel
    ref = sum(integrate.quad(weighted, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
              for a, b in [(-np.inf, -1), (-1, 0), (0, 1), (1, np.inf)])
    assert rule.integrate(f) == pytest.approx(ref, rel=1e-11)
    assert rule.inner(lambda x: np.exp(-x * x / 2), lambda x: np.exp(-x * x / 2)) == pytest.approx(
        c_alpha(alpha) * math.gamma(1 - alpha / 2), rel=1e-12)


def test_inner_product_rule_validates_alpha():
    with pytest.raises(ValueError):
        sp.AlphaInnerProductSpec(2.0)


# --- norm identities ---------------------------------------------------------

@pytest.mark.parametrize("alpha", np.linspace(0.2, 1.8, 5))
@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 3.0, 20.0])
def test_indicator_norm_identity(alpha, t):
    from ggbm.model import indicator_norm_sq
    assert sp.indicator_norm_quad(alpha, t) == pytest.approx(indicator_norm_sq(alpha, t), rel=1e-9)


@pytest.mark.parametrize("alpha, g, t, want", [
    (0.7, 1.0, 3.0, 3.0),
    (1.2, 1.5, 2.0, 2**1.5),
    (1.3, 1.3, 0.4, 0.4**1.3),
])
def test_deconvolution_examples(alpha, g, t, want):
    assert sp.deconvolution_norm_check(alpha, g, t) == pytest.approx(want, rel=1e-9)


def test_deconvolution_rejects_bad_time():
    with pytest.raises(ValueError):
        sp.deconvolution_norm_check(1.0, 1.0, 0.0)
