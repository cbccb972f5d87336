"""Fourier-inverted marginal density against a direct scale-mixture integral.

The reference integrates the Gaussian kernel over Kanter's (U, W)
representation of the mixing variable with nested adaptive quadrature.

    python scripts/density_check.py --alpha 1.2 --beta 0.6
"""

from __future__ import annotations

import argparse
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ggbm.density import marginal_density, standard_deviation
from ggbm.model import GgbmParams


@dataclass
class Config:
    alpha: float = 1.2
    beta: float = 0.6
    t: float = 1.0
    points: int = 13
    span_sd: float = 6.0


def mixture_density(alpha, beta, x, t):
    c = 1.0 - beta
    v0 = 2.0 * t**alpha

    def inner(u):
        a = v0 * math.exp(-beta * math.log(math.sin(beta * math.pi * u))
                          - c * math.log(math.sin(c * math.pi * u)) + math.log(math.sin(math.pi * u)))

        def g(w):
            v = a * w**c
            return math.exp(-w - x * x / (2 * v)) / math.sqrt(2 * math.pi * v)
        return integrate.quad(g, 0, math.inf, epsabs=0, epsrel=1e-12, limit=200)[0]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(inner, 0, 1, epsabs=0, epsrel=1e-11, limit=200)[0]


def main(cfg: Config):
    p = GgbmParams(cfg.alpha, cfg.beta)
    xs = np.linspace(0.0, cfg.span_sd * standard_deviation(p, cfg.t), cfg.points)[1:]
    print(f"{'x':>10} {'fourier':>22} {'mixture':>22} {'rel err':>9}")
    for x in xs:
        f = marginal_density(p, x, cfg.t)
        ref = mixture_density(cfg.alpha, cfg.beta, x, cfg.t)
        print(f"{x:10.4f} {f:22.15e} {ref:22.15e} {abs(f / ref - 1):9.1e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, typ in (("alpha", float), ("beta", float), ("t", float), ("points", int)):
        ap.add_argument(f"--{name}", type=typ)
    main(Config(**{k: v for k, v in vars(ap.parse_args()).items() if v is not None}))
