"""Timing harness comparing window shifting against 3-D spectral synthesis
and the dense Cholesky oracle."""
from __future__ import annotations

import csv
import statistics
import time
import tracemalloc
from dataclasses import asdict, dataclass

import numpy as np

from .diagnostics import MAX_ORACLE_POINTS, cholesky_oracle
from .gaussian import RngStream, simulate_spacetime_spectral, simulate_spatial_circulant
from .grid import Grid2D
from .spectra import CompactCovariance, Damped, PowerLaw
from .traveling import frozen_field, plan_extended_grid
from .velocity import Constant

METHODS = ("window_shift", "spectral3d", "cholesky")
BENCH_VELOCITY = (1.0, 0.0)


class BenchTimeout(RuntimeError):
    """A single benchmark run exceeded its time budget."""


@dataclass(frozen=True)
class BenchResult:
    method: str
    n: int
    T: int
    wall_time_s: float
    peak_bytes: int
    repeats: int

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.wall_time_s > 0:
            raise ValueError("wall_time_s must be positive")
        if self.repeats < 3:
            raise ValueError("repeats must be >= 3")


def _window_shift(n, T, seed, v=BENCH_VELOCITY):
    g = Grid2D.square(n)
    plan = plan_extended_grid(g, T, Constant(v))
    big, _ = simulate_spatial_circulant(PowerLaw(3.0), plan.big_grid(g), RngStream(seed))
    return frozen_field(big, g, T, v)


def _spectral3d(n, T, seed, v=BENCH_VELOCITY):
    spec = Damped(PowerLaw(3.0), v, 0.25, 1.0)
    return simulate_spacetime_spectral(spec, (n, n, T + 1), RngStream(seed), embed=True, check_real=False)


def _cholesky(n, T, seed, v=BENCH_VELOCITY):
    return cholesky_oracle(CompactCovariance(8.0, 2.0), Grid2D.square(n), T, v, RngStream(seed))


_RUNNERS = {"window_shift": _window_shift, "spectral3d": _spectral3d, "cholesky": _cholesky}


def feasible(method: str, n: int, T: int) -> bool:
    return method != "cholesky" or n * n * (T + 1) <= MAX_ORACLE_POINTS


def run_case(method: str, n: int, T: int, repeats: int = 3, seed: int = 0,
             budget_s: float | None = None) -> BenchResult:
    """Median wall time of ``repeats`` runs after one discarded warmup.

    Peak memory comes from a separate traced run so tracing does not skew
    the timings.
    """
    if repeats < 3:
        raise ValueError("repeats must be >= 3")
    if not feasible(method, n, T):
        raise ValueError(f"{method} is infeasible at n={n}, T={T}")
    fn = _RUNNERS[method]
    fn(n, T, seed)
    times = []
    for r in range(repeats):
        t0 = time.perf_counter()
        fn(n, T, seed + r + 1)
        dt = time.perf_counter() - t0
        if budget_s is not None and dt > budget_s:
            raise BenchTimeout(f"{method} n={n} T={T} took {dt:.2f}s > budget {budget_s:.2f}s")
        times.append(dt)
    tracemalloc.start()
    try:
        fn(n, T, seed)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    return BenchResult(method, int(n), int(T), statistics.median(times), int(peak), repeats)


def run_bench(grid_list, epoch_list, methods=("window_shift", "spectral3d"), repeats: int = 3,
              budget_s: float | None = None, seed: int = 0) -> list[BenchResult]:
    out = []
    for T in epoch_list:
        for n in grid_list:
            for m in methods:
                if feasible(m, n, T):
                    out.append(run_case(m, n, T, repeats, seed, budget_s))
    return out


def fit_slopes(results) -> dict:
    """Least-squares slope of ``log(time)`` against ``log(n)`` per method and ``T``."""
    groups = {}
    for r in results:
        groups.setdefault((r.method, r.T), []).append(r)
    slopes = {}
    for key, rows in groups.items():
        if len({r.n for r in rows}) < 2:
            continue
        x = np.log([r.n for r in rows])
        y = np.log([r.wall_time_s for r in rows])
        slopes[key] = float(np.polyfit(x, y, 1)[0])
    return slopes


def write_csv(path, results) -> None:
    fields = list(BenchResult.__dataclass_fields__)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in results:
            w.writerow(asdict(r))
