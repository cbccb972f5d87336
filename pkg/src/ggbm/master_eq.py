"""Solver for the stretched time-fractional master equation.

    u(x,t) = u0(x) + 1/Gamma(b) int_0^t (a/b) s^(a/b-1) (t^(a/b) - s^(a/b))^(b-1) u_xx(x,s) ds

with u0 = delta. In stretched time T = t^(a/b) this is u = u0 + I^b[u_xx], a
Riemann-Liouville integral of order b, which is what ``solve_master`` marches
on a uniform T grid. ``solve_master_stretched`` marches the same problem on
the corresponding (non-uniform) t nodes, building its product-integration
weights by quadrature of the stretched kernel in t; the two must agree.

Space: second-order central differences on [-X, X], u = 0 at both ends.
Time: u_n = u0 + sum_{j=1..n} W[n, j] D2 u_j, one tridiagonal solve per step.
The history never touches D2 u0, so the delta is only ever an additive term.

Schemes for W:
  "trapezoid"  product trapezoid (default); the start-up panels use the
               rectangle rule, see below
  "rectangle"  product rectangle (right end point) on every panel
Both integrate constants exactly, so mass and the second moment
(2 t^a / Gamma(b+1)) are reproduced up to boundary leakage.

The trapezoid rule barely damps the stiff spatial modes (at b = 1 it is
Crank-Nicolson), so rough data at the start rings and goes negative. Panels
up to and including the first step after the initial data (the delta, or the
last warm-started node) therefore use the strongly damping rectangle rule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg

from .density import DensityField, density_field, standard_deviation, symmetric_grid
from .errors import NumericalError
from .mlf import gamma
from .model import GgbmParams

NEG_RTOL = 1e-8
BOUNDARY_RTOL = 1e-8


class BoundaryContaminationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GridDelta:
    """u0 = 1/dx at the centre node."""


@dataclass(frozen=True)
class WarmStart:
    """Take u at all nodes with t <= t0 from the analytic density.

    ``t0=None`` warm-starts the first ``n_nodes`` time nodes.
    """
    t0: float | None = None
    n_nodes: int = 4


@dataclass(frozen=True)
class SolverConfig:
    t_final: float = 1.0
    x_half_width: float | None = None  # default: 10 standard deviations at t_final
    n_x: int = 801
    n_t: int = 256
    delta_init: GridDelta | WarmStart = field(default_factory=WarmStart)
    scheme: str = "trapezoid"
    snapshots: int = 1

    def __post_init__(self):
        if not self.t_final > 0:
            raise ValueError("t_final must be positive")
        if self.n_x < 3 or self.n_x % 2 == 0:
            raise ValueError(f"n_x must be odd and >= 3, got {self.n_x}")
        if self.n_t < 8:
            raise ValueError(f"n_t must be >= 8, got {self.n_t}")
        if self.x_half_width is not None and not self.x_half_width > 0:
            raise ValueError("x_half_width must be positive")
        if self.scheme not in ("rectangle", "trapezoid"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 1 <= self.snapshots <= self.n_t:
            raise ValueError("snapshots must lie in [1, n_t]")

    def half_width(self, params: GgbmParams) -> float:
        if self.x_half_width is not None:
            return float(self.x_half_width)
        return 10.0 * standard_deviation(params, self.t_final)


@dataclass
class Snapshot:
    field: DensityField
    step: int
    mass: float
    second_moment: float
    min_value: float
    boundary_ratio: float

    def to_dict(self) -> dict:
        return {"t": self.field.t, "step": self.step, "mass": self.mass,
                "second_moment": self.second_moment, "min_value": self.min_value,
                "boundary_ratio": self.boundary_ratio}


@dataclass
class MasterSolution:
    params: GgbmParams
    config: SolverConfig
    x: np.ndarray
    t_nodes: np.ndarray
    snapshots: list[Snapshot]
    boundary_contaminated: bool = False

    @property
    def fields(self) -> list[DensityField]:
        return [s.field for s in self.snapshots]


def _panel_moments(beta, n, h):
    """Exact kernel integrals over panel [T_k, T_k+1] seen from T_n, k = 0..n-1.

    Returns (m0, m1): m0 = int (T_n - tau)^(b-1) dtau / Gamma(b) and the
    weights of the linear interpolant's two end values.
    """
    k = np.arange(n)
    a = (n - k).astype(float)
    b = a - 1.0
    g = gamma(beta)
    d0 = (a**beta - b**beta) / beta
    d1 = (a ** (beta + 1) - b ** (beta + 1)) / (beta + 1)
    scale = h**beta / g
    m0 = scale * d0
    left = scale * (d1 - b * d0)   # coefficient of g_k
    right = scale * (a * d0 - d1)  # coefficient of g_{k+1}
    return m0, left, right


def product_weights(beta, n_t, h, scheme="trapezoid", n_rect=1):
    """Lower-triangular W with I^b[g](T_n) ~ sum_{j>=1} W[n, j] g_j on T_n = n h.

    Under "trapezoid" the first ``n_rect`` panels still use the rectangle rule.
    """
    W = np.zeros((n_t + 1, n_t + 1))
    for n in range(1, n_t + 1):
        m0, left, right = _panel_moments(beta, n, h)
        r = n if scheme == "rectangle" else min(n_rect, n)
        W[n, 1:r + 1] += m0[:r]
        W[n, r:n] += left[r:]
        W[n, r + 1:n + 1] += right[r:]
    return W


def _stretched_kernel_weights(alpha, beta, t, scheme="trapezoid", n_rect=1):
    """Same weights as ``product_weights`` but integrated in physical time.

    Kernel k(t_n, s) = (a/b) s^(a/b-1) (t_n^(a/b) - s^(a/b))^(b-1) / Gamma(b),
    integrated over [t_j-1, t_j] by QUADPACK with the algebraic end-point
    singularities passed as weights. Trapezoid panels interpolate linearly
    in s^(a/b), matching the T-grid scheme node for node.
    """
    p = alpha / beta
    g = gamma(beta)
    n_t = t.size - 1
    T = t**p
    W = np.zeros((n_t + 1, n_t + 1))

    def panel(n, j, basis):
        lo, hi = t[j - 1], t[j]
        tn = t[n]

        def smooth(s):
            sp = s**p
            diff = tn**p - sp
            if j == n:
                # (tn^p - s^p)^(b-1) = (tn - s)^(b-1) * ratio^(b-1); ratio > 0
                ratio = diff / (tn - s) if tn > s else p * tn ** (p - 1)
                val = ratio ** (beta - 1)
            else:
                val = diff ** (beta - 1)
            if j == 1:
                val *= p  # s^(p-1) moved into the weight
            else:
                val *= p * s ** (p - 1)
            return val * basis(sp) / g

        kw = {"epsabs": 0.0, "epsrel": 2e-14, "limit": 200}
        wvar = (p - 1.0 if j == 1 else 0.0, beta - 1.0 if j == n else 0.0)
        if wvar == (0.0, 0.0):
            return integrate.quad(smooth, lo, hi, **kw)[0]
        return integrate.quad(smooth, lo, hi, weight="alg", wvar=wvar, **kw)[0]

    for n in range(1, n_t + 1):
        for j in range(1, n + 1):
            if scheme == "rectangle" or j <= n_rect:
                W[n, j] += panel(n, j, lambda sp: 1.0)
            else:
                Tl, Tr = T[j - 1], T[j]
                W[n, j - 1] += panel(n, j, lambda sp: (Tr - sp) / (Tr - Tl))
                W[n, j] += panel(n, j, lambda sp: (sp - Tl) / (Tr - Tl))
    return W


def _snapshot_steps(config: SolverConfig):
    k = config.snapshots
    return sorted({int(round(config.n_t * i / k)) for i in range(1, k + 1)})


def _warm_nodes(config, t_nodes):
    init = config.delta_init
    if not isinstance(init, WarmStart):
        return []
    if init.t0 is None:
        return list(range(1, min(init.n_nodes, t_nodes.size - 1) + 1))
    return [j for j in range(1, t_nodes.size) if t_nodes[j] <= init.t0]


def _start_panels(config, t_nodes):
    """Rectangle panels needed so the first scheme step after the data is damped."""
    warm = _warm_nodes(config, t_nodes)
    return (max(warm) if warm else 0) + 1


def _initial_state(params, config, x, t_nodes):
    n_int = x.size - 2
    dx = x[1] - x[0]
    u0 = np.zeros(n_int)
    u0[n_int // 2] = 1.0 / dx
    warm = {}
    for j in _warm_nodes(config, t_nodes):
        u = density_field(params, x[1:-1], t_nodes[j]).values
        warm[j] = u / (u.sum() * dx)  # unit discrete mass
    return u0, warm


def _march(params, config, x, t_nodes, W):
    n_int = x.size - 2
    dx = x[1] - x[0]
    coef = params.scale**2 / dx**2
    n_t = t_nodes.size - 1
    u0, warm = _initial_state(params, config, x, t_nodes)

    def d2(u):
        out = -2.0 * u
        out[1:] += u[:-1]
        out[:-1] += u[1:]
        return coef * out

    G = np.zeros((n_t + 1, n_int))
    keep = set(_snapshot_steps(config))
    states = {}
    for n in range(1, n_t + 1):
        if n in warm:
            u = warm[n]
        else:
            rhs = u0 + W[n, 1:n] @ G[1:n]
            w = W[n, n] * coef
            ab = np.empty((3, n_int))
            ab[0, :] = -w
            ab[1, :] = 1.0 + 2.0 * w
            ab[2, :] = -w
            u = linalg.solve_banded((1, 1), ab, rhs, check_finite=False)
            if not np.all(np.isfinite(u)):
                raise NumericalError(f"linear solve failed at step {n}")
        G[n] = d2(u)
        if n in keep:
            states[n] = u
    return states


def _package(params, config, x, t_nodes, states):
    dx = x[1] - x[0]
    snaps = []
    contaminated = False
    for n, u in sorted(states.items()):
        full = np.zeros(x.size)
        full[1:-1] = u
        umax = float(full.max())
        umin = float(full.min())
        if umin < -NEG_RTOL * umax:
            raise NumericalError(
                f"negative undershoot {umin:.3e} exceeds {NEG_RTOL:g} * max(u) at t={t_nodes[n]:.6g}")
        ratio = max(abs(full[1]), abs(full[-2])) / umax
        if ratio > BOUNDARY_RTOL:
            contaminated = True
            warnings.warn(
                f"boundary contamination at t={t_nodes[n]:.6g}: u near boundary is "
                f"{ratio:.2e} of max(u); widen x_half_width", BoundaryContaminationWarning,
                stacklevel=3)
        snaps.append(Snapshot(
            field=DensityField(x_grid=x, t=float(t_nodes[n]), values=full),
            step=n,
            mass=float(full.sum() * dx),
            second_moment=float((x * x * full).sum() * dx),
            min_value=umin,
            boundary_ratio=float(ratio),
        ))
    return MasterSolution(params=params, config=config, x=x, t_nodes=t_nodes,
                          snapshots=snaps, boundary_contaminated=contaminated)


def _grids(params, config):
    X = config.half_width(params)
    x = symmetric_grid(X, config.n_x)
    p = params.alpha / params.beta
    T_final = config.t_final**p
    h = T_final / config.n_t
    T = np.arange(config.n_t + 1) * h
    t = T ** (1.0 / p)
    t[-1] = config.t_final
    return x, h, t


def solve_master(params: GgbmParams, config: SolverConfig | None = None) -> MasterSolution:
    """March the master equation in stretched time T = t^(alpha/beta)."""
    config = config or SolverConfig()
    x, h, t = _grids(params, config)
    W = product_weights(params.beta, config.n_t, h, config.scheme, _start_panels(config, t))
    return _package(params, config, x, t, _march(params, config, x, t, W))


def solve_master_stretched(params: GgbmParams, config: SolverConfig | None = None) -> MasterSolution:
    """Same problem marched in physical t with quadrature-built kernel weights.

    O(n_t^2) QUADPACK calls; meant for cross-checking at modest n_t.
    """
    config = config or SolverConfig()
    x, _, t = _grids(params, config)
    W = _stretched_kernel_weights(params.alpha, params.beta, t, config.scheme,
                                  _start_panels(config, t))
    return _package(params, config, x, t, _march(params, config, x, t, W))


def l1_error(solution: MasterSolution, index: int = -1) -> float:
    """L1(x) distance between a snapshot and the Fourier-inverted density."""
    snap = solution.snapshots[index]
    ref = density_field(solution.params, solution.x, snap.field.t).values
    dx = solution.x[1] - solution.x[0]
    return float(np.abs(snap.field.values - ref).sum() * dx)
