"""Spatial and space-time spectral densities and their grid discretization.

Conventions
-----------
* Wavenumbers and frequencies are angular, per unit length / per time step,
  taken on the DFT grid and mapped into ``(-pi, pi]``.
* A discretized spectrum ``S`` on ``dims`` is tied to its covariance by the
  unitary-inverse DFT: ``c = ifftn(S)``, which divides by the bin count, so
  ``c[0, 0, 0] == S.mean()``.
* ``|.|`` around scalar line terms is read as absolute value.
* On the line ``omega = -k.v`` the orientationally persistent density is
  clamped using ``|omega + k.v| >= pi / Tn`` (half the omega bin width).
* Bins where the spatial power law or the frequency-dependent damping is
  infinite at zero frequency are set to 0 (zero-mean field, no DC power).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import SpectrumError, SymmetryError


# -- spatial spectra / covariances -------------------------------------------

@dataclass(frozen=True)
class Flat:
    """White spectrum ``S == level``; usable as spatial or space-time spectrum."""

    level: float = 1.0
    kind = "flat"

    def __post_init__(self):
        if not self.level >= 0:
            raise SpectrumError("flat level must be >= 0")


@dataclass(frozen=True)
class PowerLaw:
    """``S_XX(k) = ||k||^(-alpha)``."""

    alpha: float
    kind = "power_law"

    def __post_init__(self):
        if not self.alpha > 0:
            raise SpectrumError(f"alpha must be > 0, got {self.alpha}")


_BASES = ("exponential", "spherical")


@dataclass(frozen=True)
class CompactCovariance:
    """Covariance ``c0(h)`` truncated to zero beyond ``||h|| > h0``.

    ``base="exponential"``: ``c0(h) = variance * exp(-||h|| / scale)``.
    ``base="spherical"``: the spherical model with range ``h0`` (``scale``
    unused), positive definite in up to three dimensions.
    """

    h0: float
    scale: float = 1.0
    base: str = "exponential"
    variance: float = 1.0
    kind = "compact"

    def __post_init__(self):
        if self.base not in _BASES:
            raise SpectrumError(f"unknown base covariance {self.base!r}; choose from {_BASES}")
        if not self.h0 > 0 or not self.scale > 0 or not self.variance > 0:
            raise SpectrumError("h0, scale and variance must be positive")

    def __call__(self, h1, h2):
        r = np.hypot(np.asarray(h1, dtype=float), np.asarray(h2, dtype=float))
        if self.base == "exponential":
            c = np.exp(-r / self.scale)
        else:
            x = r / self.h0
            c = 1.0 - 1.5 * x + 0.5 * x ** 3
        return np.where(r <= self.h0, self.variance * c, 0.0)


SpatialSpec = Union[Flat, PowerLaw, CompactCovariance]


# -- space-time spectra ------------------------------------------------------

def _check_delta(delta):
    if not delta > 0:
        raise SpectrumError(f"delta must be > 0, got {delta}")
    if not delta < 0.5:
        warnings.warn(f"persistence delta={delta} lies outside (0, 1/2); "
                      "the line singularity is not integrable", stacklevel=3)


def _check_spatial(spatial):
    if not isinstance(spatial, (Flat, PowerLaw, CompactCovariance)):
        raise SpectrumError(f"spatial part must be a spatial spectrum, got {type(spatial).__name__}")


@dataclass(frozen=True)
class FrozenDelta:
    """``S_XX(k) * delta(omega + k.v)``: the rigidly transported field."""

    spatial: SpatialSpec
    v: tuple[float, float]
    kind = "frozen_delta"

    def __post_init__(self):
        _check_spatial(self.spatial)
        object.__setattr__(self, "v", (float(self.v[0]), float(self.v[1])))


@dataclass(frozen=True)
class OrientPersistent:
    """``S_XX(k) * |omega + k.v|^(-2 delta)``."""

    spatial: SpatialSpec
    v: tuple[float, float]
    delta: float
    kind = "orient_persistent"

    def __post_init__(self):
        _check_spatial(self.spatial)
        _check_delta(self.delta)
        object.__setattr__(self, "v", (float(self.v[0]), float(self.v[1])))


@dataclass(frozen=True)
class Damped:
    """``S_XX(k) * ((omega + k.v)^2 + h^2)^(-delta)``."""

    spatial: SpatialSpec
    v: tuple[float, float]
    delta: float
    h: float
    kind = "damped"

    def __post_init__(self):
        _check_spatial(self.spatial)
        _check_delta(self.delta)
        if not self.h > 0:
            raise SpectrumError(f"damping h must be > 0, got {self.h}")
        object.__setattr__(self, "v", (float(self.v[0]), float(self.v[1])))


@dataclass(frozen=True)
class FreqDamped:
    """``S_XX(k) * ((omega + k.v)^2 + (a omega)^2)^(-delta)``."""

    spatial: SpatialSpec
    v: tuple[float, float]
    delta: float
    a: float
    kind = "freq_damped"

    def __post_init__(self):
        _check_spatial(self.spatial)
        _check_delta(self.delta)
        if not self.a > 0:
            raise SpectrumError(f"damping a must be > 0, got {self.a}")
        object.__setattr__(self, "v", (float(self.v[0]), float(self.v[1])))


SpaceTimeSpec = Union[Flat, FrozenDelta, OrientPersistent, Damped, FreqDamped]
SPATIAL_KINDS = (Flat, PowerLaw, CompactCovariance)
SPACETIME_KINDS = (Flat, FrozenDelta, OrientPersistent, Damped, FreqDamped)


# -- evaluation --------------------------------------------------------------

def _lattice_lags(h0):
    H = int(math.floor(h0))
    return np.arange(-H, H + 1, dtype=float)


def compact_lattice_spectrum(cov: CompactCovariance, k1, k2) -> np.ndarray:
    """Lattice spectrum ``sum_h c(h) cos(k.h)`` at wavenumber pairs (any shape)."""
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    shape = np.broadcast(k1, k2).shape
    k1, k2 = np.broadcast_to(k1, shape).ravel(), np.broadcast_to(k2, shape).ravel()
    lags = _lattice_lags(cov.h0)
    H1, H2 = np.meshgrid(lags, lags, indexing="ij")
    c = cov(H1, H2)
    keep = c != 0
    h1, h2, cv = H1[keep], H2[keep], c[keep]
    out = np.empty(k1.size)
    step = max(1, 2_000_000 // max(cv.size, 1))
    for a in range(0, k1.size, step):
        phase = np.outer(k1[a:a + step], h1) + np.outer(k2[a:a + step], h2)
        out[a:a + step] = np.cos(phase) @ cv
    return np.maximum(out, 0.0).reshape(shape)


def eval_spatial(spec: SpatialSpec, k) -> np.ndarray | float:
    """Spatial spectral density at wavenumber ``k = (k1, k2)`` (arrays broadcast).

    The power law is set to 0 at ``k = 0``.
    """
    k1 = np.asarray(k[0], dtype=float)
    k2 = np.asarray(k[1], dtype=float)
    if isinstance(spec, Flat):
        out = np.full(np.broadcast(k1, k2).shape, float(spec.level))
    elif isinstance(spec, PowerLaw):
        r = np.hypot(k1, k2)
        out = np.where(r > 0, np.where(r > 0, r, 1.0) ** (-spec.alpha), 0.0)
    elif isinstance(spec, CompactCovariance):
        out = compact_lattice_spectrum(spec, k1, k2)
    else:
        raise SpectrumError(f"{type(spec).__name__} is not a spatial spectrum")
    return out[()] if np.ndim(out) == 0 else out


def _line_factor(spec, kv, omega, eps_line):
    u = omega + kv
    with np.errstate(divide="ignore", invalid="ignore"):
        if isinstance(spec, OrientPersistent):
            au = np.abs(u)
            if eps_line:
                au = np.maximum(au, eps_line)
            return au ** (-2.0 * spec.delta)
        if isinstance(spec, Damped):
            return (u * u + spec.h ** 2) ** (-spec.delta)
        if isinstance(spec, FreqDamped):
            return (u * u + (spec.a * omega) ** 2) ** (-spec.delta)
    raise SpectrumError(f"no line factor for {type(spec).__name__}")


def eval_spacetime(spec: SpaceTimeSpec, k, omega, eps_line: float | None = None):
    """Space-time spectral density at ``(k, omega)``.

    ``eps_line`` clamps ``|omega + k.v|`` from below for the orientationally
    persistent spectrum.  Delta-line spectra are not pointwise evaluable; use
    :func:`delta_line`.
    """
    if isinstance(spec, FrozenDelta):
        raise SpectrumError("frozen-field spectrum is a delta line; use delta_line()")
    k1 = np.asarray(k[0], dtype=float)
    k2 = np.asarray(k[1], dtype=float)
    omega = np.asarray(omega, dtype=float)
    if isinstance(spec, Flat):
        out = np.full(np.broadcast(k1, k2, omega).shape, float(spec.level))
        return out[()] if out.ndim == 0 else out
    if not isinstance(spec, (OrientPersistent, Damped, FreqDamped)):
        raise SpectrumError(f"{type(spec).__name__} is not a space-time spectrum")
    sxx = np.asarray(eval_spatial(spec.spatial, (k1, k2)))
    kv = k1 * spec.v[0] + k2 * spec.v[1]
    line = _line_factor(spec, kv, omega, eps_line)
    with np.errstate(invalid="ignore"):
        out = np.where(sxx == 0, 0.0, sxx * line)
    return out[()] if out.ndim == 0 else out


def delta_line(spec: FrozenDelta, k) -> dict:
    """Descriptor of the frozen-field delta line at wavenumber ``k``."""
    kv = float(k[0]) * spec.v[0] + float(k[1]) * spec.v[1]
    return {"support": -kv, "mass": float(eval_spatial(spec.spatial, k))}


# -- grids -------------------------------------------------------------------

def angular_freqs(n: int, spacing: float = 1.0) -> np.ndarray:
    """DFT-ordered angular frequencies in ``(-pi/spacing, pi/spacing]``."""
    f = 2.0 * np.pi * np.fft.fftfreq(n, d=spacing)
    if n % 2 == 0:
        f[n // 2] = -f[n // 2]
    return f


@dataclass(frozen=True)
class FreqGrid3:
    k1: np.ndarray
    k2: np.ndarray
    omega: np.ndarray

    @classmethod
    def from_dims(cls, dims):
        n1, n2, nt = dims
        return cls(angular_freqs(n1), angular_freqs(n2), angular_freqs(nt))

    @property
    def dims(self):
        return (self.k1.size, self.k2.size, self.omega.size)

    def mesh(self):
        return np.meshgrid(self.k1, self.k2, self.omega, indexing="ij")

    def eps_line(self) -> float:
        return math.pi / self.omega.size


def mirror(a: np.ndarray) -> np.ndarray:
    """Array indexed at the negated DFT bin along every axis."""
    axes = tuple(range(a.ndim))
    return np.roll(np.flip(a, axis=axes), 1, axis=axes)


def spatial_spectrum_grid(spec: SpatialSpec, n1: int, n2: int, spacing: float = 1.0) -> np.ndarray:
    """Spatial spectrum on the ``n1 x n2`` DFT grid (Hermitian-symmetric)."""
    k1 = angular_freqs(n1, spacing)
    k2 = angular_freqs(n2, spacing)
    if isinstance(spec, CompactCovariance):
        lags = _lattice_lags(spec.h0)
        H1, H2 = np.meshgrid(lags, lags, indexing="ij")
        C = spec(H1 * spacing, H2 * spacing)
        E1 = np.exp(-1j * np.outer(k1 * spacing, lags))
        E2 = np.exp(-1j * np.outer(k2 * spacing, lags))
        S = np.maximum((E1 @ C @ E2.T).real, 0.0)
    else:
        K1, K2 = np.meshgrid(k1, k2, indexing="ij")
        S = np.asarray(eval_spatial(spec, (K1, K2)), dtype=float)
    return 0.5 * (S + mirror(S))


def discretize_spectrum(spec: SpaceTimeSpec, dims) -> np.ndarray:
    """Space-time spectrum on the DFT grid of ``dims = (N1, N2, Tn)``.

    The result is exactly Hermitian-symmetric, nonnegative and finite.  For
    :class:`FrozenDelta` each wavenumber column carries ``Tn * S_XX(k)`` at
    the omega bin nearest ``-k.v`` (aliased into the band), so the omega
    average per column equals ``S_XX(k)``.
    """
    n1, n2, nt = (int(d) for d in dims)
    if min(n1, n2, nt) < 2:
        raise ValueError(f"dims must be >= (2, 2, 2), got {dims}")
    fg = FreqGrid3.from_dims((n1, n2, nt))
    if isinstance(spec, Flat):
        return np.full((n1, n2, nt), float(spec.level))
    if isinstance(spec, FrozenDelta):
        sxx = spatial_spectrum_grid(spec.spatial, n1, n2)
        K1, K2 = np.meshgrid(fg.k1, fg.k2, indexing="ij")
        kv = K1 * spec.v[0] + K2 * spec.v[1]
        m = np.rint(-kv * nt / (2.0 * np.pi)).astype(np.int64) % nt
        S = np.zeros((n1, n2, nt))
        I, J = np.indices((n1, n2))
        S[I, J, m] = nt * sxx
        return 0.5 * (S + mirror(S))
    if not isinstance(spec, (OrientPersistent, Damped, FreqDamped)):
        raise SpectrumError(f"{type(spec).__name__} is not a space-time spectrum")
    sxx = spatial_spectrum_grid(spec.spatial, n1, n2)[:, :, None]
    K1, K2, W = fg.mesh()
    kv = K1 * spec.v[0] + K2 * spec.v[1]
    line = _line_factor(spec, kv, W, fg.eps_line())
    with np.errstate(invalid="ignore"):
        S = np.where((sxx == 0) | ~np.isfinite(line), 0.0, sxx * line)
    return 0.5 * (S + mirror(S))


def covariance_from_spectrum(S: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Covariance ``c(h, tau) = ifftn(S)`` (divides by the bin count)."""
    c = np.fft.ifftn(S)
    scale = max(float(np.abs(c.real).max()), np.finfo(float).tiny)
    resid = float(np.abs(c.imag).max())
    if resid > rtol * scale:
        raise SymmetryError(f"imaginary residue {resid:.3e} exceeds {rtol:g} relative; "
                            "spectrum is not Hermitian-symmetric")
    return c.real
