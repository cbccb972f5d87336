"""Relative error of E_beta(-s) against an mpmath Laplace-inversion reference.

    python scripts/mlf_accuracy.py --betas 0.1 0.5 0.9 --points 40
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from ggbm.mlf import mittag_leffler_neg


@dataclass
class Config:
    betas: list[float] = field(default_factory=lambda: [0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 0.99])
    s_min: float = 1e-4
    s_max: float = 1e8
    points: int = 30
    dps: int = 30


def reference(beta, s, dps):
    # p^(beta-1) / (p^beta + 1) inverted at t = s^(1/beta)
    with mp.workdps(dps):
        b = mp.mpf(beta)
        t = mp.mpf(s) ** (1 / b)
        return float(mp.invertlaplace(lambda p: p ** (b - 1) / (p**b + 1), t, method="talbot"))


def main(cfg: Config):
    s = np.geomspace(cfg.s_min, cfg.s_max, cfg.points)
    print(f"{'beta':>6} {'max rel err':>12} {'at s':>10} {'eval us/pt':>11}")
    for beta in cfg.betas:
        t0 = time.perf_counter()
        got = mittag_leffler_neg(beta, s)
        us = 1e6 * (time.perf_counter() - t0) / s.size
        ref = np.array([reference(beta, x, cfg.dps) for x in s])
        err = np.abs(got / ref - 1)
        i = int(np.argmax(err))
        print(f"{beta:6.3f} {err[i]:12.2e} {s[i]:10.3g} {us:11.2f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--betas", type=float, nargs="+")
    ap.add_argument("--points", type=int)
    ap.add_argument("--s-min", type=float)
    ap.add_argument("--s-max", type=float)
    args = {k: v for k, v in vars(ap.parse_args()).items() if v is not None}
    main(Config(**args))
