"""Monte Carlo calibration: z-scores of the ensemble estimators and KS pass rates.

Part one samples one large ensemble per (alpha, beta) and prints the
standard estimator suite. Part two repeats the stationarity and
self-similarity KS tests over many seeds and reports how often they pass.

    python scripts/mc_calibration.py --paths 10000 --runs 100
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

import numpy as np

from ggbm import stats
from ggbm.model import GgbmParams
from ggbm.sampler import TimeGrid, sample_ggbm


@dataclass
class Config:
    pairs: list[tuple[float, float]] = field(
        default_factory=lambda: [(0.6, 0.8), (1.0, 1.0), (1.4, 0.8), (1.5, 0.75), (0.5, 0.5)])
    paths: int = 10_000
    n_steps: int = 1024
    t_final: float = 2.0
    runs: int = 100
    seed: int = 1


def estimator_table(cfg: Config):
    grid = TimeGrid(cfg.n_steps, cfg.t_final / cfg.n_steps)
    for i, (a, b) in enumerate(cfg.pairs):
        ens = sample_ggbm(GgbmParams(a, b), grid, cfg.paths, cfg.seed + i)
        rows = stats.standard_suite(ens, max_variance_points=6)
        worst = max(abs(r.z_score) for r in rows)
        print(f"\nalpha={a} beta={b}  ({cfg.paths} paths, max |z| = {worst:.2f})")
        for r in rows:
            print(f"  {r.check:34s} {r.point_estimate:12.6g} +- {r.std_error:9.2g}"
                  f"  target {r.target:10.6g}  z {r.z_score:+6.2f}")


def ks_rates(cfg: Config):
    def stationarity(seed):
        e = sample_ggbm(GgbmParams(0.8, 0.8), TimeGrid(20, 0.25), 1000, seed)
        return stats.stationarity_test(e, (0.0, 1.0), (4.0, 5.0))

    def duration_mismatch(seed):
        e = sample_ggbm(GgbmParams(1.5, 0.75), TimeGrid(8, 0.25), 1000, 10_000 + seed)
        return stats.ks_pvalue(stats.window_increments(e, (0.0, 0.25)), stats.window_increments(e, (1.0, 1.5)))

    def self_similar(a):
        def run(seed):
            e = sample_ggbm(GgbmParams(1.3, 0.6), TimeGrid(16, 0.25), 2000, 20_000 + seed)
            x = e.paths[:1000, 4]
            y = e.paths[1000:, 4 * a] / a**0.65
            return stats.ks_pvalue(x, y)
        return run

    checks = [("stationarity [0,1] vs [4,5], p > 0.01", stationarity, True),
              ("duration dt vs 2dt, p < 0.01", duration_mismatch, False),
              ("self-similarity a=2, p > 0.01", self_similar(2), True),
              ("self-similarity a=4, p > 0.01", self_similar(4), True)]
    print(f"\nKS pass rates over {cfg.runs} seeds")
    for name, fn, want_large in checks:
        p = np.array([fn(s) for s in range(cfg.runs)])
        hits = int(np.sum(p > 0.01) if want_large else np.sum(p < 0.01))
        print(f"  {name:42s} {hits:4d}/{cfg.runs}   median p {np.median(p):.3g}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int)
    ap.add_argument("--n-steps", type=int, dest="n_steps")
    ap.add_argument("--runs", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--skip-ks", action="store_true")
    args = vars(ap.parse_args())
    skip = args.pop("skip_ks")
    cfg = Config(**{k: v for k, v in args.items() if v is not None})
    estimator_table(cfg)
    if not skip:
        ks_rates(cfg)
