"""L1 distance of the master-equation solution from the Fourier-inverted density.

Sweeps n_t at fixed n_x (and optionally the start-up treatment), writing a
CSV table to stdout or --out.

    python scripts/master_convergence.py --nt 64 128 256 512
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field

from ggbm import master_eq
from ggbm.manifest import csv_text
from ggbm.model import GgbmParams


@dataclass
class Config:
    pairs: list[tuple[float, float]] = field(default_factory=lambda: [(1.0, 1.0), (0.8, 0.8), (1.5, 0.9)])
    n_x: int = 801
    n_t: list[int] = field(default_factory=lambda: [64, 128, 256, 512])
    init: str = "warm"  # or "grid"


def sweep(cfg: Config):
    rows = []
    for a, b in cfg.pairs:
        p = GgbmParams(a, b)
        init = master_eq.WarmStart() if cfg.init == "warm" else master_eq.GridDelta()
        for n in cfg.n_t:
            t0 = time.perf_counter()
            sol = master_eq.solve_master(p, master_eq.SolverConfig(n_x=cfg.n_x, n_t=n, delta_init=init))
            snap = sol.snapshots[-1]
            rows.append((a, b, n, master_eq.l1_error(sol), snap.mass - 1, snap.min_value,
                         time.perf_counter() - t0))
            print(f"alpha={a} beta={b} n_t={n:5d}  L1={rows[-1][3]:.3e}  ({rows[-1][-1]:.1f}s)",
                  file=sys.stderr)
    return rows


def main(cfg: Config, out=None):
    rows = sweep(cfg)
    cols = list(zip(*rows))
    text = csv_text(["alpha", "beta", "n_t", "l1", "mass_err", "min_u", "seconds"], cols)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nt", type=int, nargs="+", dest="n_t")
    ap.add_argument("--nx", type=int, dest="n_x")
    ap.add_argument("--init", choices=("warm", "grid"))
    ap.add_argument("--out")
    args = vars(ap.parse_args())
    out = args.pop("out")
    main(Config(**{k: v for k, v in args.items() if v is not None}), out)
