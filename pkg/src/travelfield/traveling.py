"""Traveling fields built by shifting, mixing, rotating or warping windows of
one large spatial field, plus the extended-grid planner.

Sign convention: ``Z(s, t) = X(s - v t)``, so frame ``t`` samples the base
field at ``coord(s) - v t`` and content moves by ``+v t``.  Frame ``k`` is at
time ``k * dt``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .errors import GridRangeError, OutOfDomainError, PlanningError, ReplanError
from .flows import FlowField
from .gaussian import RngStream
from .grid import Grid2D, SpaceTimeField, SpatialField, sample, window_extract
from .velocity import (Constant, Field, GaussianRandom, Mixture, Normal, RotationMixture,
                       SampledMixture, WrappedNormal, cov_sqrt)

PLAN_QUANTILE = 0.95
_PLAN_MC_DRAWS = 200_000
_PLAN_MC_SEED = 0x5EED
_EPS = 1e-9


# -- planning ------------------------------------------------------------------

@dataclass(frozen=True)
class PlanReport:
    """Extended-grid requirement for one window and velocity spec.

    ``pad_low``/``pad_high`` are the cells needed below/above the window on
    each axis; ``v_max`` is the largest per-axis displacement over the run
    divided by the horizon ``T * dt`` (for constant velocities this is
    ``max(|v1|, |v2|)``).
    """

    N_required: int
    v_max: float
    rule: str
    margin_cells: int
    pad_low: tuple[int, int]
    pad_high: tuple[int, int]
    window_shape: tuple[int, int]
    extra: dict = field(default_factory=dict, compare=False)

    def big_grid(self, out_grid: Grid2D, N: int | None = None) -> Grid2D:
        """Square extended grid of size ``N`` (default ``N_required``) holding the window."""
        N = self.N_required if N is None else int(N)
        if N < self.N_required:
            raise PlanningError(f"extended grid N={N} is below the required N={self.N_required}")
        origin = []
        for a in (0, 1):
            need = self.window_shape[a] + self.pad_low[a] + self.pad_high[a]
            low = self.pad_low[a] + (N - need) // 2
            origin.append(out_grid.origin[a] - out_grid.spacing * low)
        return Grid2D(N, N, out_grid.spacing, tuple(origin))

    def to_dict(self):
        return {"N_required": self.N_required, "v_max": self.v_max, "rule": self.rule,
                "margin_cells": self.margin_cells, "pad_low": list(self.pad_low),
                "pad_high": list(self.pad_high), **self.extra}


def _normal_quantiles(mu, sd, level):
    if sd == 0:
        return mu, mu
    z = norm.ppf(level)
    return mu - z * sd, mu + z * sd


def _component_ranges(vel, T, n_cells):
    """Per-axis (lo, hi) velocity bounds and the rule used."""
    if isinstance(vel, Constant):
        return [(vel.v[a], vel.v[a]) for a in (0, 1)], "deterministic"
    if isinstance(vel, Mixture):
        arr = np.asarray(vel.velocities)
        return [(arr[:, a].min(), arr[:, a].max()) for a in (0, 1)], "deterministic"
    if isinstance(vel, GaussianRandom):
        draws = {"once": 1, "per_step": max(T, 1), "per_point": max(T, 1) * n_cells}[vel.redraw]
        level = 1.0 - (1.0 - PLAN_QUANTILE) / draws
        cov = np.asarray(vel.cov)
        return [_normal_quantiles(vel.mu[a], math.sqrt(cov[a, a]), level) for a in (0, 1)], "percentile95"
    if isinstance(vel, RotationMixture):
        cov = np.asarray(vel.trans_cov)
        return [_normal_quantiles(vel.trans_mu[a], math.sqrt(cov[a, a]), PLAN_QUANTILE)
                for a in (0, 1)], "percentile95"
    if isinstance(vel, SampledMixture):
        gen = np.random.Generator(np.random.Philox(_PLAN_MC_SEED))
        th = vel.phase.sample(gen, _PLAN_MC_DRAWS)
        amp = vel.amplitude.sample(gen, _PLAN_MC_DRAWS)
        comps = (amp * np.cos(th), amp * np.sin(th))
        q = 100 * (1 - PLAN_QUANTILE), 100 * PLAN_QUANTILE
        return [tuple(np.percentile(c, q)) for c in comps], "percentile95"
    raise TypeError(f"unsupported velocity spec {type(vel).__name__}")


def flow_singularity_check(flow: FlowField, out_grid: Grid2D):
    """Raise :class:`PlanningError` if a velocity singularity lies in the window."""
    x, y = out_grid.axes()
    for p in flow.singular_points():
        if x[0] - _EPS <= p[0] <= x[-1] + _EPS and y[0] - _EPS <= p[1] <= y[-1] + _EPS:
            raise PlanningError(f"{flow.kind} flow is unbounded at singular point "
                                f"({p[0]:g}, {p[1]:g}) inside the simulation domain")


def plan_extended_grid(n, T: int, vel, dt: float = 1.0, margin_cells: int = 1) -> PlanReport:
    """Smallest square extended grid ``N`` keeping every frame in the domain.

    ``n`` is a window size or a :class:`Grid2D`.  Deterministic velocities and
    flows use exact bounds; random velocities use the 95th percentile rule
    (family-wise over the number of draws for per-step/per-point redraws),
    and rotation mixtures add the window circumradius about ``c0``.
    """
    out = n if isinstance(n, Grid2D) else Grid2D(int(n), int(n))
    T = int(T)
    if T < 0:
        raise ValueError("T must be >= 0")
    sp = out.spacing
    horizon = T * dt
    shape = out.shape
    # sampling extents in window-index units
    lo = [0.0, 0.0]
    hi = [shape[0] - 1.0, shape[1] - 1.0]
    extra = {}
    if isinstance(vel, Field):
        flow = vel.flow
        flow_singularity_check(flow, out)
        rule = "field-sup"
        s1, s2 = out.coords()
        v_sup = 0.0
        disp = 0.0
        for k in range(T + 1):
            t = k * dt
            v1, v2 = flow.velocity(s1, s2, t)
            if not (np.all(np.isfinite(v1)) and np.all(np.isfinite(v2))):
                raise PlanningError(f"{flow.kind} flow is not finite over the domain at t={t:g}")
            v_sup = max(v_sup, float(np.abs(v1).max()), float(np.abs(v2).max()))
            for a, (s, v) in enumerate(((s1, v1), (s2, v2))):
                idx = (s - v * t - out.origin[a]) / sp
                lo[a] = min(lo[a], float(idx.min()))
                hi[a] = max(hi[a], float(idx.max()))
                disp = max(disp, float(np.abs(v).max()) * t)
        v_max = disp / horizon if horizon > 0 else 0.0
        extra["v_sup"] = v_sup
    else:
        ranges, rule = _component_ranges(vel, T, out.size)
        v_max = max(max(abs(r[0]), abs(r[1])) for r in ranges)
        if isinstance(vel, RotationMixture):
            x, y = out.axes()
            c = vel.c0
            rc = max(math.hypot(px - c[0], py - c[1]) for px in (x[0], x[-1]) for py in (y[0], y[-1]))
            extra["circumradius"] = rc
            for a in (0, 1):
                lo[a] = min(lo[a], (c[a] - rc - out.origin[a]) / sp)
                hi[a] = max(hi[a], (c[a] + rc - out.origin[a]) / sp)
        for a, (vlo, vhi) in enumerate(ranges):
            lo[a] -= max(vhi, 0.0) * horizon / sp
            hi[a] -= min(vlo, 0.0) * horizon / sp
        extra["velocity_bounds"] = [list(map(float, r)) for r in ranges]
    pad_low = tuple(int(math.ceil(max(0.0, -lo[a]) - _EPS)) for a in (0, 1))
    pad_high = tuple(int(math.ceil(max(0.0, hi[a] - (shape[a] - 1)) - _EPS)) for a in (0, 1))
    N = max(shape[a] + pad_low[a] + pad_high[a] for a in (0, 1)) + int(margin_cells)
    return PlanReport(N, float(v_max), rule, int(margin_cells), pad_low, pad_high, shape, extra)


# -- generators ----------------------------------------------------------------

def _times(T, dt):
    return [k * dt for k in range(int(T) + 1)]


def _replan(err: OutOfDomainError) -> ReplanError:
    return ReplanError(f"a random velocity draw exceeded the planned extended grid: {err}; "
                       "re-plan with a larger N", required_size=err.required_size)


def frozen_field(big: SpatialField, out_grid: Grid2D, T: int, v, dt: float = 1.0,
                 interp: str = "bilinear") -> SpaceTimeField:
    """Rigid transport ``Z(s, t) = X(s - v t)``."""
    frames = [window_extract(big, (-v[0] * t, -v[1] * t), out_grid, interp).values
              for t in _times(T, dt)]
    meta = {"generator": "frozen", "velocity": [float(v[0]), float(v[1])]}
    return SpaceTimeField(out_grid, np.stack(frames), dt, meta)


def random_velocity_field(big: SpatialField, out_grid: Grid2D, T: int, mu, cov, redraw: str,
                          rng: RngStream, dt: float = 1.0, interp: str = "bilinear") -> SpaceTimeField:
    """``Z(s, t) = X(s - v(s, t) t)`` with ``v ~ N(mu, cov)``.

    ``redraw`` selects one draw for the whole field (``"once"``), one per frame
    (``"per_step"``) or an i.i.d. draw per space-time cell (``"per_point"``).
    Draws leaving the extended field abort with :class:`ReplanError`.
    """
    gen = rng.generator()
    L = cov_sqrt(cov)
    mu = np.asarray(mu, dtype=float)
    times = _times(T, dt)
    meta = {"generator": "random_velocity", "redraw": redraw}
    try:
        if redraw == "once":
            v = mu + L @ gen.standard_normal(2)
            out = frozen_field(big, out_grid, T, v, dt, interp)
            out.metadata.update(meta, velocity=v.tolist())
            return out
        if redraw == "per_step":
            vs = [mu + L @ gen.standard_normal(2) for _ in times]
            frames = [window_extract(big, (-v[0] * t, -v[1] * t), out_grid, interp).values
                      for v, t in zip(vs, times)]
            meta["velocities"] = [v.tolist() for v in vs]
            return SpaceTimeField(out_grid, np.stack(frames), dt, meta)
        if redraw == "per_point":
            s1, s2 = out_grid.coords()
            frames = []
            for t in times:
                z = gen.standard_normal(out_grid.shape + (2,))
                v = mu + z @ L.T
                frames.append(sample(big, s1 - v[..., 0] * t, s2 - v[..., 1] * t, interp))
            return SpaceTimeField(out_grid, np.stack(frames), dt, meta)
    except ReplanError:
        raise
    except OutOfDomainError as err:
        raise _replan(err) from err
    raise ValueError(f"unknown redraw mode {redraw!r}")


def normalize_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if w.size == 0 or not total > 0 or np.any(w < 0):
        raise ValueError("weights must be nonnegative with a positive sum")
    return w / total


def distributed_field(big: SpatialField, out_grid: Grid2D, T: int, velocities, weights,
                      dt: float = 1.0, interp: str = "bilinear") -> SpaceTimeField:
    """``Z(s, t) = sum_i w_i X(s - v_i t)`` with weights normalized to sum 1."""
    velocities = [tuple(map(float, v)) for v in velocities]
    if not velocities:
        raise ValueError("at least one velocity is required")
    if len(velocities) != len(weights):
        raise ValueError("velocities and weights differ in length")
    w = normalize_weights(weights)
    frames = []
    for t in _times(T, dt):
        acc = None
        for wi, v in zip(w, velocities):
            term = wi * window_extract(big, (-v[0] * t, -v[1] * t), out_grid, interp).values
            acc = term if acc is None else acc + term
        frames.append(acc)
    meta = {"generator": "distributed", "velocities": [list(v) for v in velocities],
            "weights_raw": [float(x) for x in weights], "weights": w.tolist()}
    return SpaceTimeField(out_grid, np.stack(frames), dt, meta)


def sample_mixture_velocities(v_pref, n_v: int, phase: WrappedNormal, amp: Normal, rng: RngStream):
    """Draw ``n_v`` velocities about a preferred one.

    Angles are drawn first, then amplitudes.  Returns ``(velocities, weights)``
    with raw weights ``F_P(theta_i) * F_A(|v_i|)`` (not normalized).
    """
    gen = rng.generator()
    theta = phase.sample(gen, int(n_v))
    a = amp.sample(gen, int(n_v))
    vel = np.column_stack([a * np.cos(theta), a * np.sin(theta)])
    w = np.asarray(phase.cdf(theta)) * np.asarray(amp.cdf(a))
    return vel, np.atleast_1d(w)


def _rotated_coords(s1, s2, theta, center, shift):
    """Coordinates sampled by the window rotated anticlockwise by ``theta`` about
    ``center`` and then translated by ``shift``."""
    u1 = s1 - shift[0] - center[0]
    u2 = s2 - shift[1] - center[1]
    c, s = math.cos(theta), math.sin(theta)
    return center[0] + c * u1 + s * u2, center[1] - s * u1 + c * u2


def rotate_translate(big: SpatialField, out_grid: Grid2D, theta: float, center, shift=(0.0, 0.0),
                     interp: str = "bilinear") -> SpatialField:
    """Window of ``big`` rotated by ``theta`` about ``center`` then shifted by ``shift``."""
    s1, s2 = out_grid.coords()
    x, y = _rotated_coords(s1, s2, theta, center, shift)
    return SpatialField(out_grid, sample(big, x, y, interp))


def rotation_mixture_field(big: SpatialField, out_grid: Grid2D, T: int, spec: RotationMixture,
                           rng: RngStream, dt: float = 1.0, interp: str = "bilinear") -> SpaceTimeField:
    """Per-frame mixture of rotated and translated windows.

    For each frame (including ``t = 0``) the stream yields ``n_theta`` angles,
    then one translation ``v^t``.  The rotation center is
    ``C^t = C^0 - v^t t`` and the weights ``F_R(theta)`` are normalized.
    """
    gen = rng.generator()
    phase = spec.phase
    L = cov_sqrt(spec.trans_cov)
    mu = np.asarray(spec.trans_mu)
    s1, s2 = out_grid.coords()
    frames, per_frame = [], []
    for t in _times(T, dt):
        theta = phase.sample(gen, int(spec.n_theta))
        v = mu + L @ gen.standard_normal(2)
        center = (spec.c0[0] - v[0] * t, spec.c0[1] - v[1] * t)
        raw = np.atleast_1d(phase.cdf(theta))
        w = normalize_weights(raw)
        shift = (v[0] * t, v[1] * t)
        acc = None
        try:
            for wi, th in zip(w, theta):
                x, y = _rotated_coords(s1, s2, float(th), center, shift)
                term = wi * sample(big, x, y, interp)
                acc = term if acc is None else acc + term
        except OutOfDomainError as err:
            raise _replan(err) from err
        frames.append(acc)
        per_frame.append({"thetas": theta.tolist(), "velocity": v.tolist(),
                          "center": [center[0], center[1]],
                          "weights_raw": raw.tolist(), "weights": w.tolist()})
    meta = {"generator": "rotation_mixture", "c0": list(spec.c0), "frames": per_frame}
    return SpaceTimeField(out_grid, np.stack(frames), dt, meta)


def evolving_field(big: SpatialField, out_grid: Grid2D, T: int, flow: FlowField,
                   dt: float = 1.0, interp: str = "bilinear") -> SpaceTimeField:
    """Pointwise warp ``Z(s, t) = X(s - v(s, t) t)`` by a deterministic flow.

    The metadata holds the velocity grids ``(T + 1, 2, n1, n2)``.
    """
    flow_singularity_check(flow, out_grid)
    s1, s2 = out_grid.coords()
    frames, vgrids = [], []
    for t in _times(T, dt):
        v1, v2 = flow.velocity(s1, s2, t)
        frames.append(sample(big, s1 - v1 * t, s2 - v2 * t, interp))
        vgrids.append(np.stack([v1, v2]))
    meta = {"generator": "evolving", "flow": flow.to_dict(), "velocity_grids": np.stack(vgrids)}
    return SpaceTimeField(out_grid, np.stack(frames), dt, meta)


def plane_wave(ts, out_grid: Grid2D, T: int, eta, v: float, ts_origin: float = 0.0,
               ts_step: float = 1.0, dt: float = 1.0) -> SpaceTimeField:
    """``Z(s, t) = X_T(t - eta.s / v)`` with linear interpolation of ``ts``.

    ``ts[m]`` is the signal at time ``ts_origin + m * ts_step``.
    """
    if v == 0:
        raise ValueError("plane-wave speed must be nonzero")
    ts = np.asarray(ts, dtype=float)
    grid_t = ts_origin + ts_step * np.arange(ts.size)
    s1, s2 = out_grid.coords()
    proj = (eta[0] * s1 + eta[1] * s2) / v
    frames = []
    for t in _times(T, dt):
        u = t - proj
        if u.min() < grid_t[0] - _EPS or u.max() > grid_t[-1] + _EPS:
            raise GridRangeError(f"signal covers [{grid_t[0]:g}, {grid_t[-1]:g}] but the window "
                                 f"needs [{u.min():g}, {u.max():g}] at t={t:g}")
        frames.append(np.interp(u, grid_t, ts))
    meta = {"generator": "plane_wave", "eta": list(map(float, eta)), "speed": float(v)}
    return SpaceTimeField(out_grid, np.stack(frames), dt, meta)
