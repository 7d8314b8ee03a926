"""Velocity specifications and the circular/linear distributions they use."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.stats import norm

from .flows import FlowField

REDRAW_MODES = ("once", "per_step", "per_point")


def _pair(p):
    return (float(p[0]), float(p[1]))


def _matrix(m):
    a = np.asarray(m, dtype=float)
    if a.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
    return tuple(map(tuple, a.tolist()))


def _check_cov(cov):
    a = np.asarray(cov)
    if not np.allclose(a, a.T, rtol=0, atol=0):
        raise ValueError("covariance must be symmetric")
    if np.linalg.eigvalsh(a).min() < -1e-12 * max(1.0, abs(a).max()):
        raise ValueError("covariance must be positive semidefinite")


def cov_sqrt(cov) -> np.ndarray:
    """Symmetric square root of a PSD matrix (exactly zero for a zero matrix)."""
    lam, vec = np.linalg.eigh(np.asarray(cov, dtype=float))
    return (vec * np.sqrt(np.clip(lam, 0.0, None))) @ vec.T


@dataclass(frozen=True)
class WrappedNormal:
    """Normal ``N(mu, sigma^2)`` wrapped onto ``[mu - pi, mu + pi)``."""

    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError("sigma must be >= 0")

    def wrap(self, theta):
        return self.mu + (np.asarray(theta, dtype=float) - self.mu + np.pi) % (2 * np.pi) - np.pi

    def sample(self, gen: np.random.Generator, size=None):
        return self.wrap(self.mu + self.sigma * gen.standard_normal(size))

    def cdf(self, theta):
        """``P(Theta <= theta)`` with ``theta`` taken in ``[mu - pi, mu + pi)``."""
        u = self.wrap(theta) - self.mu
        if self.sigma == 0:
            return np.where(u > 0, 1.0, np.where(u == 0, 0.5, 0.0))[()]
        kmax = int(math.ceil(8 * self.sigma / (2 * np.pi))) + 1
        ks = np.arange(-kmax, kmax + 1) * 2 * np.pi
        u = np.asarray(u, dtype=float)[..., None]
        out = (norm.cdf((u + ks) / self.sigma) - norm.cdf((-np.pi + ks) / self.sigma)).sum(-1)
        return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class Normal:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError("sigma must be >= 0")

    def sample(self, gen: np.random.Generator, size=None):
        return self.mu + self.sigma * gen.standard_normal(size)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.sigma == 0:
            out = np.where(x > self.mu, 1.0, np.where(x == self.mu, 0.5, 0.0))
        else:
            out = norm.cdf((x - self.mu) / self.sigma)
        return out[()] if np.ndim(out) == 0 else out


# -- velocity specs ------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    v: tuple[float, float]
    kind = "constant"

    def __post_init__(self):
        object.__setattr__(self, "v", _pair(self.v))


@dataclass(frozen=True)
class GaussianRandom:
    """``v ~ N(mu, cov)`` drawn once, once per frame, or per space-time cell."""

    mu: tuple[float, float]
    cov: tuple
    redraw: str = "once"
    kind = "gaussian_random"

    def __post_init__(self):
        object.__setattr__(self, "mu", _pair(self.mu))
        object.__setattr__(self, "cov", _matrix(self.cov))
        _check_cov(self.cov)
        if self.redraw not in REDRAW_MODES:
            raise ValueError(f"redraw must be one of {REDRAW_MODES}")


@dataclass(frozen=True)
class Mixture:
    velocities: tuple
    weights: tuple
    kind = "mixture"

    def __post_init__(self):
        vel = tuple(_pair(v) for v in self.velocities)
        w = tuple(float(x) for x in self.weights)
        if not vel or len(vel) != len(w):
            raise ValueError("mixture needs equally many velocities and weights (at least one)")
        if min(w) < 0 or sum(w) <= 0:
            raise ValueError("mixture weights must be nonnegative and not all zero")
        object.__setattr__(self, "velocities", vel)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class SampledMixture:
    """Mixture whose velocities are drawn around a preferred velocity.

    Angles follow a wrapped normal about ``angle(v_pref)`` and amplitudes a
    normal about ``||v_pref||``; weights are the product of the two CDFs.
    """

    v_pref: tuple[float, float]
    n_v: int
    phase_sigma: float
    amp_sigma: float
    kind = "sampled_mixture"

    def __post_init__(self):
        object.__setattr__(self, "v_pref", _pair(self.v_pref))
        if int(self.n_v) < 1:
            raise ValueError("n_v must be >= 1")
        if self.phase_sigma < 0 or self.amp_sigma < 0:
            raise ValueError("sigmas must be >= 0")

    @property
    def phase(self) -> WrappedNormal:
        return WrappedNormal(math.atan2(self.v_pref[1], self.v_pref[0]), self.phase_sigma)

    @property
    def amplitude(self) -> Normal:
        return Normal(math.hypot(*self.v_pref), self.amp_sigma)


@dataclass(frozen=True)
class RotationMixture:
    """Per-frame rotations ``theta ~ WN(phase_mu, phase_sigma^2)`` about ``C^t``
    plus a translation ``v^t ~ N(trans_mu, trans_cov)``."""

    n_theta: int
    phase_mu: float
    phase_sigma: float
    trans_mu: tuple[float, float]
    trans_cov: tuple
    c0: tuple[float, float]
    kind = "rotation_mixture"

    def __post_init__(self):
        if int(self.n_theta) < 1:
            raise ValueError("n_theta must be >= 1")
        object.__setattr__(self, "trans_mu", _pair(self.trans_mu))
        object.__setattr__(self, "trans_cov", _matrix(self.trans_cov))
        object.__setattr__(self, "c0", _pair(self.c0))
        _check_cov(self.trans_cov)

    @property
    def phase(self) -> WrappedNormal:
        return WrappedNormal(self.phase_mu, self.phase_sigma)


@dataclass(frozen=True)
class Field:
    flow: FlowField
    kind = "field"


VelocitySpec = Union[Constant, GaussianRandom, Mixture, SampledMixture, RotationMixture, Field]


def velocity_to_dict(vel) -> dict:
    if isinstance(vel, Constant):
        return {"kind": vel.kind, "v": list(vel.v)}
    if isinstance(vel, GaussianRandom):
        return {"kind": vel.kind, "mu": list(vel.mu), "cov": [list(r) for r in vel.cov],
                "redraw": vel.redraw}
    if isinstance(vel, Mixture):
        return {"kind": vel.kind, "velocities": [list(v) for v in vel.velocities],
                "weights": list(vel.weights)}
    if isinstance(vel, SampledMixture):
        return {"kind": vel.kind, "v_pref": list(vel.v_pref), "n_v": int(vel.n_v),
                "phase_sigma": vel.phase_sigma, "amp_sigma": vel.amp_sigma}
    if isinstance(vel, RotationMixture):
        return {"kind": vel.kind, "n_theta": int(vel.n_theta), "phase_mu": vel.phase_mu,
                "phase_sigma": vel.phase_sigma, "trans_mu": list(vel.trans_mu),
                "trans_cov": [list(r) for r in vel.trans_cov], "c0": list(vel.c0)}
    if isinstance(vel, Field):
        return {"kind": vel.kind, "flow": vel.flow.to_dict()}
    raise TypeError(f"not a velocity spec: {vel!r}")


def velocity_from_dict(d: dict):
    kind = d["kind"]
    if kind == "constant":
        return Constant(d["v"])
    if kind == "gaussian_random":
        return GaussianRandom(d["mu"], d["cov"], d.get("redraw", "once"))
    if kind == "mixture":
        return Mixture(d["velocities"], d["weights"])
    if kind == "sampled_mixture":
        return SampledMixture(d["v_pref"], int(d["n_v"]), float(d["phase_sigma"]), float(d["amp_sigma"]))
    if kind == "rotation_mixture":
        return RotationMixture(int(d["n_theta"]), float(d["phase_mu"]), float(d["phase_sigma"]),
                               d["trans_mu"], d["trans_cov"], d["c0"])
    if kind == "field":
        return Field(FlowField.from_dict(d["flow"]))
    raise ValueError(f"unknown velocity kind {kind!r}")
