"""Command-line entry point: ``ggbm <command> [flags]``.

Exit codes: 0 success, 1 invalid input, 2 numerical failure (including a
failed ``verify`` check). Flags given on the command line override values
read from ``--config`` (TOML: top-level keys, or a table named after the
command); anything still unset falls back to the defaults below.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import density, master_eq, mlf, sampler, stats, verify
from .errors import NumericalError
from .manifest import RunManifest, csv_text, dumps, fresh_seed, sidecar_path
from .model import GgbmParams

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

DEFAULTS = {
    "paths": {"scale": 1.0, "n_paths": 1, "format": "csv", "threads": 1},
    "density": {"scale": 1.0, "t": 1.0, "x_max": None, "points": 401, "format": "csv"},
    "master": {"scale": 1.0, "t_final": 1.0, "x_width": None, "nx": 801, "nt": 256,
               "snapshots": 1, "scheme": "trapezoid", "init": "warm", "warm_nodes": 4, "t0": None},
    "mlf": {"s_min": 0.0, "s_max": 10.0, "points": 101, "log": False, "format": "csv"},
    "estimate": {"suite": "all", "format": "json"},
    "verify": {"suite": "all", "format": "json"},
}
REQUIRED = {
    "paths": ("alpha", "beta", "n_steps", "dt"),
    "density": ("alpha", "beta"),
    "master": ("alpha", "beta"),
    "mlf": ("beta",),
    "estimate": ("in_path",),
    "verify": (),
}


class InvalidInput(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(message)


def _global_flags():
    g = _Parser(add_help=False)
    S = argparse.SUPPRESS
    g.add_argument("--out", default=S, help="output file (directory for master)")
    g.add_argument("--format", choices=("csv", "json"), default=S)
    g.add_argument("--seed", type=int, default=S, help="64-bit master seed; drawn from entropy if absent")
    g.add_argument("--threads", type=int, default=S)
    g.add_argument("--config", default=S, help="TOML file with default flag values")
    g.add_argument("--quiet", action="store_true", default=S)
    return g


def _params_flags(p):
    S = argparse.SUPPRESS
    p.add_argument("--alpha", type=float, default=S)
    p.add_argument("--beta", type=float, default=S)
    p.add_argument("--scale", type=float, default=S)


def build_parser():
    S = argparse.SUPPRESS
    g = _global_flags()
    root = _Parser(prog="ggbm", description="generalized grey Brownian motion laboratory",
                   parents=[g])
    sub = root.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("paths", parents=[g], help="sample an ensemble of paths")
    _params_flags(p)
    p.add_argument("--n-steps", dest="n_steps", type=int, default=S)
    p.add_argument("--dt", type=float, default=S)
    p.add_argument("--n-paths", dest="n_paths", type=int, default=S)

    p = sub.add_parser("density", parents=[g], help="marginal density on a grid")
    _params_flags(p)
    p.add_argument("--t", type=float, default=S)
    p.add_argument("--x-max", dest="x_max", type=float, default=S, help="default: 10 standard deviations")
    p.add_argument("--points", type=int, default=S)

    p = sub.add_parser("master", parents=[g], help="solve the stretched master equation")
    _params_flags(p)
    p.add_argument("--t-final", dest="t_final", type=float, default=S)
    p.add_argument("--x-width", dest="x_width", type=float, default=S, help="half width of the domain")
    p.add_argument("--nx", type=int, default=S)
    p.add_argument("--nt", type=int, default=S)
    p.add_argument("--snapshots", type=int, default=S)
    p.add_argument("--scheme", choices=("trapezoid", "rectangle"), default=S)
    p.add_argument("--init", choices=("warm", "grid"), default=S)
    p.add_argument("--warm-nodes", dest="warm_nodes", type=int, default=S)
    p.add_argument("--t0", type=float, default=S, help="warm-start every node with t <= t0")

    p = sub.add_parser("mlf", parents=[g], help="tabulate E_beta(-s)")
    p.add_argument("--beta", type=float, default=S)
    p.add_argument("--s-min", dest="s_min", type=float, default=S)
    p.add_argument("--s-max", dest="s_max", type=float, default=S)
    p.add_argument("--points", type=int, default=S)
    p.add_argument("--log", action="store_true", default=S, help="geometric spacing")

    p = sub.add_parser("estimate", parents=[g], help="estimate statistics from an ensemble JSON")
    p.add_argument("--in", dest="in_path", default=S)
    p.add_argument("--suite", choices=("all", "variance", "hurst", "autocorrelation", "charfn"), default=S)

    p = sub.add_parser("verify", parents=[g], help="run invariant suites")
    p.add_argument("--suite", choices=verify.SUITES + ("all",), default=S)
    return root


def _load_config(path, command):
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise InvalidInput(f"cannot read config {path}: {exc}") from None
    flat = {k.replace("-", "_"): v for k, v in data.items() if not isinstance(v, dict)}
    flat.update({k.replace("-", "_"): v for k, v in data.get(command, {}).items()})
    if "in" in flat:
        flat["in_path"] = flat.pop("in")
    return flat


def resolve(argv=None) -> dict:
    """Parsed flags merged over config-file values over defaults."""
    ns = vars(build_parser().parse_args(argv))
    cmd = ns["command"]
    opts = {"out": None, "seed": None, "threads": 1, "quiet": False}
    opts.update(DEFAULTS[cmd])
    if "config" in ns:
        opts.update(_load_config(ns["config"], cmd))
    opts.update(ns)
    missing = [k for k in REQUIRED[cmd] if opts.get(k) is None]
    if missing:
        flags = ", ".join("--" + ("in" if k == "in_path" else k.replace("_", "-")) for k in missing)
        raise InvalidInput(f"{cmd}: missing required {flags}")
    if opts["threads"] is None or int(opts["threads"]) < 1:
        raise InvalidInput("--threads must be >= 1")
    return opts


def _params(o):
    return GgbmParams(o["alpha"], o["beta"], o.get("scale", 1.0))


def _seed(o):
    seed = o.get("seed")
    if seed is None:
        seed = fresh_seed()
    if not 0 <= int(seed) < 2**64:
        raise InvalidInput("--seed must be a 64-bit unsigned integer")
    return int(seed)


def _emit(o, text, manifest: RunManifest):
    """Write ``text`` to --out (plus its sidecar manifest) or to stdout."""
    out = o.get("out")
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    manifest.outputs = [path.name]
    manifest.write(sidecar_path(path))


def cmd_paths(o):
    params = _params(o)
    grid = sampler.TimeGrid(o["n_steps"], o["dt"])
    seed = _seed(o)
    ens = sampler.sample_ggbm(params, grid, o["n_paths"], seed, threads=int(o["threads"]))
    if o["format"] == "json":
        text = dumps({"params": params.to_dict(), "grid": grid.to_dict(), "seed": seed,
                      "paths": ens.paths})
    else:
        header = ["t"] + [f"path{i}" for i in range(ens.n_paths)]
        text = csv_text(header, [ens.times, *ens.paths])
    man = RunManifest("paths", params.to_dict(), {"grid": grid.to_dict(), "n_paths": ens.n_paths,
                                                  "format": o["format"]}, seed)
    _emit(o, text, man)
    return EXIT_OK


def cmd_density(o):
    params = _params(o)
    t = float(o["t"])
    x_max = o["x_max"] if o["x_max"] is not None else 10.0 * density.standard_deviation(params, t)
    if not x_max > 0 or int(o["points"]) < 2:
        raise InvalidInput("--x-max must be positive and --points >= 2")
    x = density.symmetric_grid(x_max, int(o["points"]))
    fld = density.density_field(params, x, t)
    if o["format"] == "json":
        text = dumps({"params": params.to_dict(), "t": t, "x": fld.x_grid, "f": fld.values})
    else:
        text = csv_text(["x", "f"], [fld.x_grid, fld.values])
    man = RunManifest("density", params.to_dict(),
                      {"t": t, "x_max": float(x_max), "points": int(o["points"]), "format": o["format"]},
                      None, diagnostics={"mass": fld.mass(), "second_moment": fld.moment(2)})
    _emit(o, text, man)
    return EXIT_OK


def cmd_master(o):
    params = _params(o)
    if o["init"] == "grid":
        init = master_eq.GridDelta()
    else:
        init = master_eq.WarmStart(t0=o["t0"], n_nodes=int(o["warm_nodes"]))
    cfg = master_eq.SolverConfig(t_final=o["t_final"], x_half_width=o["x_width"], n_x=o["nx"],
                                 n_t=o["nt"], delta_init=init, scheme=o["scheme"],
                                 snapshots=o["snapshots"])
    sol = master_eq.solve_master(params, cfg)
    target = lambda t: 2.0 * params.scale**2 * t**params.alpha / mlf.gamma(params.beta + 1.0)  # noqa: E731
    diag = []
    files = []
    out = o.get("out")
    outdir = Path(out) if out is not None else None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
    for i, snap in enumerate(sol.snapshots):
        d = snap.to_dict()
        d["second_moment_target"] = target(snap.field.t)
        diag.append(d)
        name = f"snapshot_{i:03d}.csv"
        files.append(name)
        text = csv_text(["x", "u"], [snap.field.x_grid, snap.field.values])
        if outdir is None:
            sys.stdout.write(f"# t={snap.field.t!r}\n" + text)
        else:
            (outdir / name).write_text(text)
    if outdir is not None:
        config = {"t_final": cfg.t_final, "x_half_width": cfg.half_width(params), "n_x": cfg.n_x,
                  "n_t": cfg.n_t, "scheme": cfg.scheme, "snapshots": cfg.snapshots,
                  "delta_init": {"kind": type(init).__name__, **vars(init)}}
        man = RunManifest("master", params.to_dict(), config, None, outputs=files,
                          diagnostics={"snapshots": diag,
                                       "boundary_contaminated": sol.boundary_contaminated})
        man.write(outdir / "manifest.json")
    return EXIT_OK


def cmd_mlf(o):
    beta = mlf.MlfOrder(o["beta"])
    lo, hi, n = float(o["s_min"]), float(o["s_max"]), int(o["points"])
    if lo < 0 or hi < lo or n < 1:
        raise InvalidInput("need 0 <= s-min <= s-max and points >= 1")
    if o["log"]:
        if lo <= 0:
            raise InvalidInput("--log needs s-min > 0")
        s = np.geomspace(lo, hi, n)
    else:
        s = np.linspace(lo, hi, n)
    e = np.atleast_1d(mlf.mittag_leffler_neg(float(beta), s))
    if o["format"] == "json":
        text = dumps({"beta": float(beta), "s": s, "E": e})
    else:
        text = csv_text(["s", "E"], [s, e])
    man = RunManifest("mlf", None, {"beta": float(beta), "s_min": lo, "s_max": hi, "points": n,
                                    "log": bool(o["log"]), "format": o["format"]}, None)
    _emit(o, text, man)
    return EXIT_OK


def _read_ensemble(path):
    try:
        data = json.loads(Path(path).read_text())
        params = GgbmParams(**data["params"])
        grid = sampler.TimeGrid(**data["grid"])
        paths = np.asarray(data["paths"], dtype=float)
        seed = int(data["seed"])
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read ensemble {path}: {exc}") from None
    if paths.ndim != 2 or paths.shape[1] != grid.n_steps + 1:
        raise InvalidInput("ensemble paths do not match its grid")
    return sampler.PathEnsemble(grid=grid, paths=paths, params=params, master_seed=seed)


def cmd_estimate(o):
    ens = _read_ensemble(o["in_path"])
    suite = o["suite"]
    if suite == "all":
        reports = stats.standard_suite(ens)
    elif suite == "variance":
        reports = stats.empirical_variance_curve(ens)
    elif suite == "hurst":
        reports = [stats.estimate_hurst(ens)]
    elif suite == "autocorrelation":
        reports = [stats.increment_autocorrelation(ens, 1)]
    else:
        reports = [stats.char_fn_report(ens, y, float(ens.times[-1])) for y in (0.5, 1.0, 2.0)]
    text = dumps([r.as_row() for r in reports])
    man = RunManifest("estimate", ens.params.to_dict(),
                      {"in": str(o["in_path"]), "suite": suite, "grid": ens.grid.to_dict(),
                       "n_paths": ens.n_paths}, ens.master_seed)
    _emit(o, text, man)
    return EXIT_OK


def cmd_verify(o):
    seed = _seed(o)
    report = verify.run(o["suite"], seed)
    man = RunManifest("verify", None, {"suite": o["suite"]}, seed)
    _emit(o, dumps(report), man)
    if not o["quiet"]:
        for c in report["checks"]:
            mark = "PASS" if c["passed"] else "FAIL"
            op = "<=" if c["kind"] == "max" else ">="
            print(f"{mark} [{c['suite']}] {c['name']}: {c['achieved']:.3e} {op} {c['required']:.1e}",
                  file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


COMMANDS = {"paths": cmd_paths, "density": cmd_density, "master": cmd_master,
            "mlf": cmd_mlf, "estimate": cmd_estimate, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        o = resolve(argv)
    except InvalidInput as exc:
        print(f"ggbm: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.ERROR if o["quiet"] else logging.WARNING,
                        format="ggbm: %(message)s")
    try:
        with warnings.catch_warnings():
            if o["quiet"]:
                warnings.simplefilter("ignore")
            return COMMANDS[o["command"]](o)
    except (NumericalError, OverflowError, np.linalg.LinAlgError) as exc:
        print(f"ggbm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, TypeError) as exc:
        print(f"ggbm: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
