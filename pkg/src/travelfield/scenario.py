"""Run a :class:`ScenarioConfig` end to end: plan, draw the base field, travel."""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import GaussianBase, ScenarioConfig, TestImage
from .errors import PlanningError
from .gaussian import EmbeddingReport, RngStream, simulate_spacetime_spectral, simulate_spatial_circulant
from .grid import Grid2D, SpaceTimeField, SpatialField
from .traveling import (PlanReport, distributed_field, evolving_field, frozen_field,
                        plan_extended_grid, random_velocity_field, rotation_mixture_field,
                        sample_mixture_velocities)
from .velocity import (Constant, Field, GaussianRandom, Mixture, RotationMixture,
                       SampledMixture)

log = logging.getLogger(__name__)

# substream tags
_BASE, _VELOCITY = 0, 1


@dataclass
class RunResult:
    field: SpaceTimeField
    plan: Optional[PlanReport] = None
    big: Optional[SpatialField] = None
    embedding: Optional[EmbeddingReport] = None


def render_test_image(big_grid: Grid2D, image: TestImage, window: Grid2D) -> SpatialField:
    """Faded rectangle on ``big_grid`` (see :class:`TestImage`)."""
    if image.center is None:
        c = tuple(window.origin[a] + window.spacing * (window.shape[a] - 1) / 2 for a in (0, 1))
    else:
        c = image.center
    s1, s2 = big_grid.coords()
    inside = np.minimum(image.half_size[0] - np.abs(s1 - c[0]), image.half_size[1] - np.abs(s2 - c[1]))
    return SpatialField(big_grid, image.amplitude * np.clip(inside / image.fade, 0.0, 1.0))


def resolve_velocity(cfg: ScenarioConfig, rng: RngStream):
    """Replace a sampled mixture by the concrete mixture it draws."""
    vel = cfg.velocity
    if isinstance(vel, SampledMixture):
        v, w = sample_mixture_velocities(vel.v_pref, vel.n_v, vel.phase, vel.amplitude,
                                         rng.substream(_VELOCITY))
        return Mixture([tuple(x) for x in v], w.tolist())
    return vel


def run_scenario(cfg: ScenarioConfig, stream_id: int = 0) -> RunResult:
    """Simulate one realization of ``cfg`` on RNG stream ``(cfg.seed, stream_id)``."""
    rng = RngStream(cfg.seed, stream_id)
    T = int(cfg.epochs)
    if cfg.is_spectral:
        f = simulate_spacetime_spectral(cfg.spectrum, (cfg.grid.n1, cfg.grid.n2, T + 1), rng, dt=cfg.dt)
        return RunResult(SpaceTimeField(cfg.grid, f.frames, cfg.dt, f.metadata))

    vel = resolve_velocity(cfg, rng)
    plan = plan_extended_grid(cfg.grid, T, vel, cfg.dt)
    N = cfg.extended_grid_override or plan.N_required
    if N < plan.N_required:
        raise PlanningError(f"extended_grid_override: N={N} is below the required "
                            f"N={plan.N_required} for this velocity spec")
    big_grid = plan.big_grid(cfg.grid, N)
    log.info("plan: N_required=%d v_max=%.4g rule=%s -> N=%d", plan.N_required, plan.v_max, plan.rule, N)

    report = None
    if isinstance(cfg.base, TestImage):
        big = render_test_image(big_grid, cfg.base, cfg.grid)
    elif isinstance(cfg.base, GaussianBase):
        big, report = simulate_spatial_circulant(cfg.spectrum, big_grid, rng.substream(_BASE),
                                                 cfg.base.min_embedding)
    else:
        raise TypeError(f"unknown base {cfg.base!r}")

    g, dt, ip = cfg.grid, cfg.dt, cfg.interp
    vrng = rng.substream(_VELOCITY)
    if isinstance(vel, Constant):
        out = frozen_field(big, g, T, vel.v, dt, ip)
    elif isinstance(vel, GaussianRandom):
        out = random_velocity_field(big, g, T, vel.mu, vel.cov, vel.redraw, vrng, dt, ip)
    elif isinstance(vel, Mixture):
        out = distributed_field(big, g, T, vel.velocities, vel.weights, dt, ip)
    elif isinstance(vel, RotationMixture):
        out = rotation_mixture_field(big, g, T, vel, vrng, dt, ip)
    elif isinstance(vel, Field):
        out = evolving_field(big, g, T, vel.flow, dt, ip)
    else:
        raise TypeError(f"unsupported velocity {vel!r}")
    return RunResult(out, plan, big, report)


def worker_count(requested: Optional[int] = None) -> int:
    """Worker pool size, capped by ``TRAVELFIELD_THREADS`` when set."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("TRAVELFIELD_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def run_ensemble(cfg: ScenarioConfig, M: int, workers: Optional[int] = None) -> list[SpaceTimeField]:
    """``M`` realizations on streams ``0..M-1`` (order preserved)."""
    n = worker_count(workers)
    if n <= 1:
        return [run_scenario(cfg, m).field for m in range(M)]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return [r.field for r in pool.map(lambda m: run_scenario(cfg, m), range(M))]
