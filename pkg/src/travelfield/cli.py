"""Command-line front end: ``travelfield {simulate,diagnose,bench,presets}``.

Exit codes: 0 success, 2 invalid config, 3 planning failure, 4 runtime or
domain error, 5 a diagnostic check failed, 6 benchmark time budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench, io, presets
from .config import FORMATS, ScenarioConfig
from .diagnostics import (averaged_periodogram, coarse_ratio, correlation_peak, empirical_cov,
                          frozen_covariance, lag_box, propagation_path)
from .errors import ConfigError, PlanningError, TravelFieldError
from .scenario import run_ensemble, run_scenario
from .spectra import FreqGrid3, discretize_spectrum, mirror
from .velocity import Constant, Field

log = logging.getLogger("travelfield")

EXIT_OK, EXIT_CONFIG, EXIT_PLAN, EXIT_RUNTIME, EXIT_CHECK, EXIT_TIMEOUT = 0, 2, 3, 4, 5, 6
CHECKS = ("cov-match", "taylor", "periodogram", "path")


def load_config(args) -> ScenarioConfig:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("give exactly one of --config or --preset")
    if args.preset:
        try:
            cfg = presets.get(args.preset)
        except KeyError as err:
            raise ConfigError(str(err.args[0])) from None
    else:
        try:
            cfg = ScenarioConfig.load(args.config)
        except OSError as err:
            raise ConfigError(f"config: cannot read {args.config}: {err}") from err
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


# -- simulate ------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = load_config(args)
    out = Path(args.out or cfg.output.directory or f"out_{cfg.name}")
    formats = tuple(args.format) if args.format else cfg.output.formats
    M = args.ensemble or 1
    for m in range(M):
        res = run_scenario(cfg, m)
        if res.plan is not None and m == 0:
            print(json.dumps({"plan": res.plan.to_dict(),
                              "N": None if res.big is None else res.big.grid.n1}))
        target = out if M == 1 else out / f"member_{m:04d}"
        io.write_spacetime(target, res.field, config=cfg, plan=res.plan,
                           big_grid=None if res.big is None else res.big.grid,
                           embedding=res.embedding, formats=formats)
    print(f"wrote {M} realization(s) of {cfg.name!r} to {out}")
    return EXIT_OK


# -- diagnose ------------------------------------------------------------------

def _verdict(check, statistic, threshold, passed, **extra):
    return {"check": check, "statistic": float(statistic), "threshold": float(threshold),
            "pass": bool(passed), **extra}


def check_cov_match(cfg, ens, radius=3, max_tau=2, n_se=3.0, frac=0.95):
    if not isinstance(cfg.velocity, Constant):
        raise ConfigError("cov-match: needs a constant-velocity scenario")
    lags = lag_box(radius)
    taus = list(range(min(max_tau, cfg.epochs) + 1))
    est = empirical_cov(ens, lags, taus)
    theo = frozen_covariance(cfg.spectrum, lags, taus, cfg.velocity.v, cfg.dt, cfg.grid.spacing)
    ok = np.abs(est.values - theo) <= n_se * est.std_errors
    table = [dict(r, theory=float(theo[i // len(taus), i % len(taus)]))
             for i, r in enumerate(est.to_rows())]
    return _verdict("cov-match", ok.mean(), frac, ok.mean() >= frac, _table=table)


def check_taylor(cfg, ens, n_se=3.0):
    if not isinstance(cfg.velocity, Constant):
        raise ConfigError("taylor: needs a constant-velocity scenario")
    v = np.asarray(cfg.velocity.v) * cfg.dt / cfg.grid.spacing
    taus = [t for t in (1, 2) if t <= cfg.epochs]
    worst = 0.0
    for tau in taus:
        h = tuple(int(round(c)) for c in v * tau)
        a = empirical_cov(ens, [h], [0])
        b = empirical_cov(ens, [(0, 0)], [tau])
        se = np.hypot(a.std_errors[0, 0], b.std_errors[0, 0])
        worst = max(worst, abs(a.values[0, 0] - b.values[0, 0]) / se)
    return _verdict("taylor", worst, n_se, worst <= n_se)


def check_periodogram(cfg, ens, tol=0.25):
    dims = (cfg.grid.n1, cfg.grid.n2, cfg.epochs + 1)
    target = discretize_spectrum(cfg.spectrum, dims)
    fg = FreqGrid3.from_dims(dims)
    mask = target > 0
    v = getattr(cfg.spectrum, "v", None)
    if v is not None:
        k1, k2, w = fg.mesh()
        mask &= np.abs(w + k1 * v[0] + k2 * v[1]) > 3 * fg.eps_line()
        # Nyquist bins hold the average with their mirror image
        mask &= mirror(mask)
    block = tuple(4 if d % 4 == 0 else 1 for d in dims)
    ratios, _ = coarse_ratio(averaged_periodogram(ens), target, mask, block)
    dev = float(np.abs(ratios - 1).max())
    return _verdict("periodogram", dev, tol, dev <= tol, blocks=int(ratios.size))


def path_probes(cfg, count=10, max_radius=2.0):
    """Window points nearest to (but not at) the flow center, up to ``count``."""
    flow = cfg.velocity.flow
    s1, s2 = cfg.grid.coords()
    r = np.hypot(s1 - flow.center[0], s2 - flow.center[1])
    order = np.argsort(r, axis=None, kind="stable")
    idx = [np.unravel_index(k, r.shape) for k in order if 0 < r.flat[k] <= max_radius]
    return [tuple(int(a) for a in i) for i in idx[:count]]


def check_path(cfg, ens, tau=1, t_idx=1, radius=4, tol=1.0, count=10):
    if not isinstance(cfg.velocity, Field):
        raise ConfigError("path: needs a velocity-field scenario")
    flow = cfg.velocity.flow
    s1, s2 = cfg.grid.coords()
    worst = 0.0
    rows = []
    for (i, j) in path_probes(cfg, count):
        s = (float(s1[i, j]), float(s2[i, j]))
        pred = propagation_path(flow, s, t_idx * cfg.dt, tau * cfg.dt).predicted_offset / cfg.grid.spacing
        got, _ = correlation_peak(ens, (i, j), t_idx, tau, radius)
        err = float(np.hypot(*(got - pred)))
        worst = max(worst, err)
        rows.append({"s": list(s), "predicted": pred.tolist(), "observed": got.tolist(), "error": err})
    return _verdict("path", worst, tol, worst <= tol and len(rows) > 0, probes=rows)


_CHECK_FN = {"cov-match": check_cov_match, "taylor": check_taylor,
             "periodogram": check_periodogram, "path": check_path}


def cmd_diagnose(args) -> int:
    cfg = load_config(args)
    M = args.ensemble or 100
    if M < 2:
        raise ConfigError("--ensemble: at least 2 realizations are required")
    ens = run_ensemble(cfg, M)
    verdicts = [_CHECK_FN[c](cfg, ens) for c in (args.check or ["cov-match"])]
    tables = {v["check"]: v.pop("_table") for v in verdicts if "_table" in v}
    text = json.dumps(verdicts, indent=2)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verdicts.json").write_text(text)
        for name, rows in tables.items():
            with open(out / f"{name}.csv", "w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=list(rows[0]))
                w.writeheader()
                w.writerows(rows)
    print(text)
    return EXIT_OK if all(v["pass"] for v in verdicts) else EXIT_CHECK


# -- bench ---------------------------------------------------------------------

def cmd_bench(args) -> int:
    try:
        results = bench.run_bench(args.grid_list, args.epoch_list, args.methods, args.repeats,
                                  args.budget)
    except bench.BenchTimeout as err:
        print(f"timeout: {err}", file=sys.stderr)
        return EXIT_TIMEOUT
    out = Path(args.out or "bench")
    out.mkdir(parents=True, exist_ok=True)
    bench.write_csv(out / "bench.csv", results)
    for r in results:
        print(f"{r.method:13s} n={r.n:5d} T={r.T:3d} time={r.wall_time_s:.4g}s peak={r.peak_bytes}")
    for (m, T), slope in sorted(bench.fit_slopes(results).items()):
        print(f"slope {m} T={T}: {slope:.3f}")
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.action == "list":
        for name in presets.NAMES:
            print(f"{name:16s} {presets.describe(name)}")
    else:
        print(presets.get(args.name).to_json())
    return EXIT_OK


def _csv_ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="travelfield", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_args(sp):
        sp.add_argument("--config", help="scenario JSON file")
        sp.add_argument("--preset", help="named scenario (see 'presets list')")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--ensemble", type=int, metavar="M", help="number of realizations")

    s = sub.add_parser("simulate", help="run a scenario and write frames")
    scenario_args(s)
    s.add_argument("--format", action="append", choices=FORMATS, help="repeatable")
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("diagnose", help="ensemble checks against theory")
    scenario_args(d)
    d.add_argument("--check", action="append", choices=CHECKS, help="repeatable")
    d.set_defaults(func=cmd_diagnose)

    b = sub.add_parser("bench", help="timing comparison")
    b.add_argument("--grid-list", type=_csv_ints, default=[32, 64, 128])
    b.add_argument("--epoch-list", type=_csv_ints, default=[8])
    b.add_argument("--methods", type=lambda t: t.split(","), default=["window_shift", "spectral3d"])
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--budget", type=float, default=None, help="seconds allowed per run")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    pr = sub.add_parser("presets", help="list or show named scenarios")
    pa = pr.add_subparsers(dest="action", required=True)
    pa.add_parser("list")
    show = pa.add_parser("show")
    show.add_argument("name")
    pr.set_defaults(func=cmd_presets)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "methods", None):
        bad = [m for m in args.methods if m not in bench.METHODS]
        if bad:
            print(f"error: --methods: unknown {bad}", file=sys.stderr)
            return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except PlanningError as err:
        print(f"planning error: {err}", file=sys.stderr)
        return EXIT_PLAN
    except (TravelFieldError, ValueError, IndexError) as err:
        print(f"runtime error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
