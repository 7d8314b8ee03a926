"""Acceptance gate: one test per criterion, each logging a PASS/FAIL line
(shown in the 'acceptance criteria' section of the pytest summary)."""
import json
import time
import warnings

import numpy as np
import pytest
from scipy.ndimage import map_coordinates

from travelfield import bench, cli, presets
from travelfield.config import ScenarioConfig
from travelfield.diagnostics import cholesky_oracle, empirical_cov, lag_box
from travelfield.errors import OutOfDomainError, PlanningError
from travelfield.flows import FlowField
from travelfield.gaussian import RngStream
from travelfield.grid import Grid2D, SpatialField, window_extract
from travelfield.io import write_spacetime
from travelfield.scenario import run_ensemble, run_scenario
from travelfield.spectra import (CompactCovariance, Damped, FreqGrid3, OrientPersistent, PowerLaw,
                                 discretize_spectrum, mirror)
from travelfield.traveling import (distributed_field, evolving_field, frozen_field,
                                   plan_extended_grid, rotate_translate)
from travelfield.velocity import Constant, Field, Mixture


@pytest.fixture(scope="module")
def frozen_ensemble():
    cfg = presets.get("frozen_gauss")
    t0 = time.perf_counter()
    ens = run_ensemble(cfg, 300)
    return cfg, ens, time.perf_counter() - t0


@pytest.mark.acceptance(1, "frozen-field exactness (fig2)")
def test_frozen_exactness(record):
    t0 = time.perf_counter()
    res = run_scenario(presets.get("fig2"))
    elapsed = time.perf_counter() - t0
    F = res.field.frames
    ok = F.shape == (9, 150, 150) and np.abs(F[0]).max() > 0
    for t in range(1, 9):
        shift = 10 * t
        ok &= np.array_equal(F[t][shift:], F[0][:-shift])
    # whole frames against the base field, including the part entering the window
    i0 = int(round(res.field.grid.origin[0] - res.big.grid.origin[0]))
    j0 = int(round(res.field.grid.origin[1] - res.big.grid.origin[1]))
    for t in range(9):
        ok &= np.array_equal(F[t], res.big.values[i0 - 10 * t: i0 - 10 * t + 150, j0: j0 + 150])
    record(bool(ok) and elapsed < 5.0, f"{elapsed:.2f}s")


@pytest.mark.acceptance(2, "second-order structure of frozen ensembles")
def test_second_order(record, frozen_ensemble):
    cfg, ens, elapsed = frozen_ensemble
    t0 = time.perf_counter()
    v = cli.check_cov_match(cfg, ens, radius=3, max_tau=2)
    elapsed += time.perf_counter() - t0
    record(v["pass"] and elapsed < 120, f"{v['statistic']:.1%} of cells within 3 SE, {elapsed:.1f}s")


@pytest.mark.acceptance(3, "Taylor's hypothesis")
def test_taylor(record, frozen_ensemble):
    cfg, ens, _ = frozen_ensemble
    v = cli.check_taylor(cfg, ens)
    record(v["pass"], f"max |diff|/SE = {v['statistic']:.2f}")


@pytest.mark.acceptance(4, "spectral fidelity and damped limit")
def test_spectral_fidelity(record):
    cfg = presets.get("damped")
    assert (cfg.grid.n1, cfg.grid.n2, cfg.epochs + 1) == (32, 32, 16)
    assert (cfg.spectrum.spatial.alpha, cfg.spectrum.delta, cfg.spectrum.h) == (5.0, 2.0, 1.0)
    t0 = time.perf_counter()
    v = cli.check_periodogram(cfg, run_ensemble(cfg, 50), tol=0.25)
    dims = (32, 32, 16)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        near = discretize_spectrum(Damped(PowerLaw(5.0), (10.0, 0.0), 2.0, 1e-6), dims)
        op = discretize_spectrum(OrientPersistent(PowerLaw(5.0), (10.0, 0.0), 2.0), dims)
    fg = FreqGrid3.from_dims(dims)
    k1, _, w = fg.mesh()
    off = (np.abs(w + 10.0 * k1) > 3 * fg.eps_line()) & (op > 0)
    off &= mirror(off)
    rel = float(np.max(np.abs(near[off] - op[off]) / op[off]))
    elapsed = time.perf_counter() - t0
    record(v["pass"] and rel <= 1e-4 and elapsed < 120,
           f"max block deviation {v['statistic']:.3f}, limit rel {rel:.1e}, {elapsed:.1f}s")


@pytest.mark.acceptance(5, "mixture reduction and fig4 weighted sum")
def test_mixture(record):
    g = Grid2D.square(20)
    big = SpatialField(Grid2D(40, 40, 1.0, (-10.0, -10.0)),
                       RngStream(5).generator().standard_normal((40, 40)))
    v = (1.5, -0.75)
    single = distributed_field(big, g, 4, [v], [3.0])
    ok_single = np.array_equal(single.frames, frozen_field(big, g, 4, v).frames)

    res = run_scenario(presets.get("fig4"))
    meta = res.field.metadata
    vel = np.asarray(meta["velocities"])
    w = np.asarray(meta["weights_raw"]) / np.sum(meta["weights_raw"])
    bg, og = res.big.grid, res.field.grid
    s1, s2 = og.coords()
    worst = 0.0
    for t in range(res.field.epochs + 1):
        expect = np.zeros(og.shape)
        for wi, vi in zip(w, vel):
            i = (s1 - vi[0] * t - bg.origin[0]) / bg.spacing
            j = (s2 - vi[1] * t - bg.origin[1]) / bg.spacing
            expect += wi * map_coordinates(res.big.values, [i, j], order=1, mode="constant", cval=np.nan)
        worst = max(worst, float(np.abs(res.field.frames[t] - expect).max()))
    ok = ok_single and len(vel) == 10 and worst <= 1e-12
    record(ok, f"singleton bitwise={ok_single}, fig4 max error {worst:.1e}")


@pytest.mark.acceptance(6, "rotation identity and fig5 centers")
def test_rotation(record, tmp_path):
    big_grid = Grid2D(80, 80, 1.0, (-20.0, -20.0))
    x, y = big_grid.coords()
    big = SpatialField(big_grid, np.sin(x / 7.0) * np.cos(y / 5.0) + 0.1 * x / 40.0 + 2.0)
    g = Grid2D.square(40)
    ref = window_extract(big, (0.0, 0.0), g).values
    rot = rotate_translate(big, g, 2 * np.pi, (19.5, 19.5)).values
    rel = float(np.max(np.abs(rot - ref)) / np.max(np.abs(ref)))

    cfg = presets.get("fig5")
    res = run_scenario(cfg)
    write_spacetime(tmp_path, res.field, config=cfg, plan=res.plan)
    side = json.loads((tmp_path / "sidecar.json").read_text())
    c0 = cfg.velocity.c0
    exact = all(fr["center"] == [c0[0] - fr["velocity"][0] * fr["time"], c0[1] - fr["velocity"][1] * fr["time"]]
                and len(fr["thetas"]) == 20 for fr in side["frames"])
    record(rel <= 1e-9 and exact and len(side["frames"]) == 9, f"2pi rel error {rel:.1e}, centers exact={exact}")


@pytest.mark.acceptance(7, "evolving-field degeneracy, Jacobians and propagation path")
def test_evolving(record):
    big = SpatialField(Grid2D(60, 60, 1.0, (-20.0, -20.0)),
                       RngStream(7).generator().standard_normal((60, 60)))
    g = Grid2D.square(20)
    v = (1.25, -0.5)
    same = np.array_equal(evolving_field(big, g, 5, FlowField.uniform(v)).frames,
                          frozen_field(big, g, 5, v).frames)

    spiral = presets.get("fig6").velocity.flow
    jac_err = 0.0
    rng = np.random.default_rng(3)
    for _ in range(50):
        s = spiral.center + rng.uniform(-70, 70, 2)
        t = rng.uniform(0, 8)
        ds, dt_ = spiral.jacobian(s, t)
        nds, ndt = spiral.numeric_jacobian(s, t)
        jac_err = max(jac_err, float(np.abs(ds - nds).max()), float(np.abs(dt_ - ndt).max()))

    cfg = presets.get("spiral_gauss")
    v = cli.check_path(cfg, run_ensemble(cfg, 2000), tau=1, tol=1.0, count=10)
    ok = same and jac_err <= 1e-6 and v["pass"] and len(v["probes"]) == 10
    record(ok, f"uniform==frozen {same}, jacobian err {jac_err:.1e}, worst path error {v['statistic']:.2f} cells")


@pytest.mark.acceptance(8, "Cholesky oracle equivalence")
def test_oracle(record):
    t0 = time.perf_counter()
    cov = CompactCovariance(20.0, 4.0)
    g = Grid2D.square(4)
    cfg = ScenarioConfig(grid=g, epochs=2, spectrum=cov, velocity=Constant((1.0, 0.0)), seed=0)
    shifted = run_ensemble(cfg, 2000)
    oracle = [cholesky_oracle(cov, g, 2, (1.0, 0.0), RngStream(1, m)) for m in range(2000)]
    lags, taus = lag_box(3), [0, 1, 2]
    a, b = empirical_cov(shifted, lags, taus), empirical_cov(oracle, lags, taus)
    z = np.abs(a.values - b.values) / np.hypot(a.std_errors, b.std_errors)
    elapsed = time.perf_counter() - t0
    record(bool(np.all(z <= 3)) and elapsed < 180, f"max z {z.max():.2f} over {z.size} lags, {elapsed:.1f}s")


def _random_scenario(rng):
    n = int(rng.integers(2, 24))
    T = int(rng.integers(0, 7))
    g = Grid2D(n, int(rng.integers(2, 24)), float(rng.choice([0.5, 1.0, 2.0])),
               tuple(rng.uniform(-20, 20, 2)))
    kind = rng.integers(0, 3)
    if kind == 0:
        return g, T, Constant(tuple(rng.uniform(-6, 6, 2)))
    if kind == 1:
        vs = [tuple(rng.uniform(-6, 6, 2)) for _ in range(int(rng.integers(1, 4)))]
        return g, T, Mixture(vs, list(rng.uniform(0.1, 1.0, len(vs))))
    flow_kind = ["uniform", "stagnation", "rigid_rotation", "vortex", "source_sink", "spiral"][rng.integers(0, 6)]
    flow = FlowField(flow_kind, k=float(rng.uniform(0.05, 0.8)), center=tuple(rng.uniform(-30, 30, 2)),
                     v=tuple(rng.uniform(-4, 4, 2)), radius_scale=float(rng.uniform(0.1, 0.6)))
    return g, T, Field(flow)


@pytest.mark.acceptance(9, "planner soundness")
def test_planner(record):
    rng = np.random.default_rng(9)
    passed = failures = 0
    while passed < 1000:
        g, T, vel = _random_scenario(rng)
        dt = float(rng.choice([0.5, 1.0]))
        try:
            plan = plan_extended_grid(g, T, vel, dt)
        except PlanningError:
            continue
        passed += 1
        bg = plan.big_grid(g)
        big = SpatialField(bg, np.zeros(bg.shape))
        try:
            if isinstance(vel, Constant):
                frozen_field(big, g, T, vel.v, dt)
            elif isinstance(vel, Mixture):
                distributed_field(big, g, T, vel.velocities, vel.weights, dt)
            else:
                evolving_field(big, g, T, vel.flow, dt)
        except OutOfDomainError:
            failures += 1
    fig2 = plan_extended_grid(150, 8, Constant((10.0, 0.0)))
    ok = failures == 0 and 230 <= fig2.N_required <= 600
    record(ok, f"{failures} out-of-domain in 1000, fig2 N_required={fig2.N_required}")


@pytest.mark.acceptance(10, "performance direction")
def test_performance(record):
    t0 = time.perf_counter()
    results = bench.run_bench([32, 64, 128], [8], ("window_shift", "spectral3d"), repeats=5)
    by = {(r.method, r.n): r.wall_time_s for r in results}
    slopes = bench.fit_slopes(results)
    ratio = by[("spectral3d", 128)] / by[("window_shift", 128)]
    s_ws, s_sp = slopes[("window_shift", 8)], slopes[("spectral3d", 8)]
    elapsed = time.perf_counter() - t0
    record(ratio >= 2 and s_ws < s_sp and elapsed < 300,
           f"speedup {ratio:.1f}x at n=128, slopes {s_ws:.2f} < {s_sp:.2f}, {elapsed:.1f}s")
