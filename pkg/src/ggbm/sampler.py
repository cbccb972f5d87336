"""Exact-in-law sample paths of B_{alpha,beta} on a uniform grid.

Each path is ``scale * sqrt(L) * G`` where G is the fBm-type Gaussian core
(covariance t^a + s^a - |t - s|^a) and L is an independent positive scalar
with Laplace transform E exp(-sL) = E_beta(-s). Conditioning on L gives the
joint characteristic function E_beta(-theta' S theta / 2), which is the
finite-dimensional law of the process.

Randomness: path ``i`` draws only from ``path_stream(master_seed, i)``, a
Philox generator keyed on (master_seed, i). Per path, the uniform and the
exponential for L come first, then the Gaussian core.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg

from .errors import NumericalError
from .model import GgbmParams, fgn_autocovariance

log = logging.getLogger(__name__)

SEED_MASK = (1 << 64) - 1
BLOCK = 256  # paths per work unit; fixed so output never depends on --threads
EMBED_RTOL = 1e-10


@dataclass(frozen=True)
class TimeGrid:
    n_steps: int
    dt: float

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps!r}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        object.__setattr__(self, "n_steps", int(self.n_steps))
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    def to_dict(self) -> dict:
        return {"n_steps": self.n_steps, "dt": self.dt}


@dataclass
class PathEnsemble:
    grid: TimeGrid
    paths: np.ndarray  # (n_paths, n_steps + 1)
    params: GgbmParams
    master_seed: int

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def increments(self) -> np.ndarray:
        return np.diff(self.paths, axis=1)


def path_stream(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for path ``index``; independent of any other index."""
    key = ((int(index) & SEED_MASK) << 64) | (int(master_seed) & SEED_MASK)
    return np.random.Generator(np.random.Philox(key=key))


def _open_uniform(stream, size):
    # strictly inside (0, 1): the Kanter map has log-singularities at both ends
    return (stream.integers(0, 1 << 53, size=size) + 0.5) * 2.0**-53


def sample_stable_oneside(beta, stream, size=None):
    """Positive beta-stable S with E exp(-sS) = exp(-s^beta).

    Kanter's representation S = (A(U) / W)^((1 - beta) / beta), evaluated in
    log space so beta close to 1 stays finite; beta = 1 returns 1 exactly.
    """
    return np.exp(-np.log(sample_mixture_scalar(beta, stream, size)) / beta)


def sample_mixture_scalar(beta, stream, size=None):
    """L = S^-beta, whose Laplace transform is E_beta(-s).

    log L = (1-b) log W - b log sin(b pi U) - (1-b) log sin((1-b) pi U)
            + log sin(pi U)
    """
    beta = float(beta)
    if not (0.0 < beta <= 1.0):
        raise ValueError(f"beta must lie in (0, 1], got {beta!r}")
    u = _open_uniform(stream, size)
    w = stream.standard_exponential(size)
    if beta == 1.0:
        return np.ones_like(w) if size is not None else 1.0
    c = 1.0 - beta
    log_l = (
        c * np.log(w)
        - beta * np.log(np.sin(beta * np.pi * u))
        - c * np.log(np.sin(c * np.pi * u))
        + np.log(np.sin(np.pi * u))
    )
    return np.exp(log_l)


@lru_cache(maxsize=32)
def _embedding(alpha: float, n: int, dt: float):
    """sqrt of circulant eigenvalues for the Wood-Chan construction, or None."""
    cov = fgn_autocovariance(alpha, np.arange(n + 1), dt)
    row = np.concatenate([cov, cov[-2:0:-1]])
    lam = np.fft.rfft(row).real
    if lam.min() < -EMBED_RTOL * lam.max():
        return None
    lam = np.clip(lam, 0.0, None)
    m = row.size
    # weights for the half spectrum: real modes at 0 and m/2, complex pairs between
    wts = np.sqrt(lam / (2.0 * m))
    wts[0] = math.sqrt(lam[0] / m)
    wts[-1] = math.sqrt(lam[-1] / m)
    return wts


@lru_cache(maxsize=32)
def _cholesky(alpha: float, n: int, dt: float):
    cov = fgn_autocovariance(alpha, np.arange(n), dt)
    return linalg.cholesky(linalg.toeplitz(cov), lower=True)


def n_normals(alpha, grid: TimeGrid) -> int:
    """Number of standard normals one path of the Gaussian core consumes."""
    if _embedding(float(alpha), grid.n_steps, grid.dt) is None:
        return grid.n_steps
    return 2 * grid.n_steps + 2


def fgn_from_normals(alpha, grid: TimeGrid, z: np.ndarray) -> np.ndarray:
    """Map standard normals (last axis of length ``n_normals``) to increments."""
    n = grid.n_steps
    wts = _embedding(float(alpha), n, grid.dt)
    if wts is None:
        return z @ _cholesky(float(alpha), n, grid.dt).T
    m = 2 * n
    half = m // 2 + 1
    spec = wts * (z[..., :half] + 1j * z[..., half:2 * half])
    spec[..., 0] = wts[0] * z[..., 0]
    spec[..., -1] = wts[-1] * z[..., half - 1]
    # Hermitian spectrum -> real sequence with the target circulant covariance
    x = np.fft.irfft(spec, n=m, axis=-1) * m
    return x[..., :n]


def sample_fgn(alpha, grid: TimeGrid, stream) -> np.ndarray:
    """Stationary Gaussian increments, variance 2 dt^alpha, exact in law.

    Davies-Harte/Wood-Chan circulant embedding; if the embedding has a
    negative eigenvalue beyond tolerance, falls back to Cholesky (logged).
    """
    if not (0.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (0, 2), got {alpha!r}")
    if _embedding(float(alpha), grid.n_steps, grid.dt) is None:
        log.warning("circulant embedding not nonnegative for alpha=%g, n=%d; using Cholesky",
                    alpha, grid.n_steps)
    z = stream.standard_normal(n_normals(alpha, grid))
    return fgn_from_normals(alpha, grid, z)


def _sample_block(params: GgbmParams, grid: TimeGrid, master_seed, start, stop):
    k = n_normals(params.alpha, grid)
    z = np.empty((stop - start, k))
    mix = np.empty(stop - start)
    for row, i in enumerate(range(start, stop)):
        stream = path_stream(master_seed, i)
        mix[row] = sample_mixture_scalar(params.beta, stream)
        z[row] = stream.standard_normal(k)
    inc = fgn_from_normals(params.alpha, grid, z)
    out = np.zeros((stop - start, grid.n_steps + 1))
    np.cumsum(inc, axis=1, out=out[:, 1:])
    out *= (params.scale * np.sqrt(mix))[:, None]
    return out


def sample_ggbm(params: GgbmParams, grid: TimeGrid, n_paths: int, master_seed: int,
                threads: int = 1) -> PathEnsemble:
    """Ensemble of ``n_paths`` paths; row i depends only on (master_seed, i)."""
    if int(n_paths) != n_paths or n_paths < 1:
        raise ValueError(f"n_paths must be a positive integer, got {n_paths!r}")
    n_paths = int(n_paths)
    if _embedding(params.alpha, grid.n_steps, grid.dt) is None:
        log.warning("circulant embedding failed for alpha=%g, n=%d; using Cholesky",
                    params.alpha, grid.n_steps)
    blocks = [(s, min(s + BLOCK, n_paths)) for s in range(0, n_paths, BLOCK)]
    run = lambda b: _sample_block(params, grid, master_seed, *b)  # noqa: E731
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    paths = np.concatenate(parts, axis=0)
    if not np.all(np.isfinite(paths)):
        raise NumericalError("non-finite values in sampled paths")
    return PathEnsemble(grid=grid, paths=paths, params=params, master_seed=int(master_seed))
