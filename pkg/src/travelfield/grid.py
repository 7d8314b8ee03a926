"""Regular 2-D grids, field containers and window resampling.

Arrays are stored row-major with shape ``(n1, n2)``: axis 0 runs along the
first coordinate ``s1`` and axis 1 along ``s2``.  Cell ``(i, j)`` sits at
``origin + spacing * (i, j)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import GridRangeError, OutOfDomainError

_SNAP = 1e-9


@dataclass(frozen=True)
class Grid2D:
    """Rectangular lattice of ``n1 x n2`` cells with square spacing."""

    n1: int
    n2: int
    spacing: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if int(self.n1) != self.n1 or int(self.n2) != self.n2:
            raise ValueError("grid sizes must be integers")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError(f"grid sizes must be >= 1, got ({self.n1}, {self.n2})")
        if not self.spacing > 0 or not math.isfinite(self.spacing):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "n2", int(self.n2))
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @classmethod
    def square(cls, n, spacing=1.0, origin=(0.0, 0.0)):
        return cls(n, n, spacing, origin)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def size(self) -> int:
        return self.n1 * self.n2

    def axes(self):
        """Coordinates along each axis."""
        x = self.origin[0] + self.spacing * np.arange(self.n1)
        y = self.origin[1] + self.spacing * np.arange(self.n2)
        return x, y

    def coords(self):
        """Coordinate arrays ``(S1, S2)`` of shape ``(n1, n2)``."""
        x, y = self.axes()
        return np.meshgrid(x, y, indexing="ij")

    def to_dict(self):
        return {"n1": self.n1, "n2": self.n2, "spacing": self.spacing,
                "origin": list(self.origin)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["n1"], d["n2"], d.get("spacing", 1.0), tuple(d.get("origin", (0.0, 0.0))))


def index_to_coord(grid: Grid2D, i: int, j: int) -> tuple[float, float]:
    """Physical coordinate of cell ``(i, j)``."""
    if not (0 <= i < grid.n1 and 0 <= j < grid.n2):
        raise GridRangeError(f"index ({i}, {j}) outside grid {grid.n1}x{grid.n2}")
    return (grid.origin[0] + grid.spacing * i, grid.origin[1] + grid.spacing * j)


def coord_to_index(grid: Grid2D, x: float, y: float) -> tuple[int, int]:
    """Inverse of :func:`index_to_coord` for coordinates lying on cells."""
    i = round((x - grid.origin[0]) / grid.spacing)
    j = round((y - grid.origin[1]) / grid.spacing)
    if not (0 <= i < grid.n1 and 0 <= j < grid.n2):
        raise GridRangeError(f"coordinate ({x}, {y}) outside grid")
    return int(i), int(j)


@dataclass(frozen=True)
class SpatialField:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            if v.size != self.grid.size:
                raise ValueError(f"values of size {v.size} do not fit grid {self.grid.shape}")
            v = v.reshape(self.grid.shape)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def flat(self) -> np.ndarray:
        """Row-major 1-D view of the values."""
        return self.values.ravel()


@dataclass(frozen=True)
class SpaceTimeField:
    """Stack of ``T + 1`` frames on one grid; frame ``t`` is at time ``t * dt``."""

    grid: Grid2D
    frames: np.ndarray
    dt: float = 1.0
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        f = np.asarray(self.frames, dtype=float)
        if f.ndim == 2:
            f = f[None]
        if f.ndim != 3 or f.shape[1:] != self.grid.shape or f.shape[0] < 1:
            raise ValueError(f"frames of shape {f.shape} do not match grid {self.grid.shape}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        f.setflags(write=False)
        object.__setattr__(self, "frames", f)

    @property
    def epochs(self) -> int:
        return self.frames.shape[0] - 1

    def frame(self, t: int) -> SpatialField:
        return SpatialField(self.grid, self.frames[t])

    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.frames.shape[0])


def _fractional_index(grid: Grid2D, x, y):
    fi = (np.asarray(x, dtype=float) - grid.origin[0]) / grid.spacing
    fj = (np.asarray(y, dtype=float) - grid.origin[1]) / grid.spacing
    # snap round-off so integer shifts stay exact
    ri, rj = np.rint(fi), np.rint(fj)
    fi = np.where(np.abs(fi - ri) < _SNAP, ri, fi)
    fj = np.where(np.abs(fj - rj) < _SNAP, rj, fj)
    return fi, fj


def _check_domain(grid: Grid2D, fi, fj):
    if fi.size == 0:
        return
    lo_i, hi_i = float(fi.min()), float(fi.max())
    lo_j, hi_j = float(fj.min()), float(fj.max())
    if lo_i < 0 or lo_j < 0 or hi_i > grid.n1 - 1 or hi_j > grid.n2 - 1 \
            or not all(map(math.isfinite, (lo_i, hi_i, lo_j, hi_j))):
        need = None
        if all(map(math.isfinite, (lo_i, hi_i, lo_j, hi_j))):
            # cells needed to cover the window and the footprint about the same origin
            need = max(math.ceil(max(hi_i, grid.n1 - 1)) - math.floor(min(lo_i, 0)) + 1,
                       math.ceil(max(hi_j, grid.n2 - 1)) - math.floor(min(lo_j, 0)) + 1)
        raise OutOfDomainError(
            f"sampling footprint spans cells [{lo_i:.3f}, {hi_i:.3f}] x [{lo_j:.3f}, {hi_j:.3f}] "
            f"but the extended field has {grid.n1}x{grid.n2} cells; "
            f"an extended grid of at least N={need} is required",
            required_size=need)


def sample(big: SpatialField, x, y, interp: str = "bilinear") -> np.ndarray:
    """Sample ``big`` at physical coordinates ``(x, y)`` (arrays of equal shape).

    Integer-aligned coordinates reproduce source values exactly for both
    schemes.  Raises :class:`OutOfDomainError` when any point falls outside
    the field.
    """
    g = big.grid
    fi, fj = _fractional_index(g, x, y)
    _check_domain(g, fi, fj)
    vals = big.values
    if interp == "nearest":
        return vals[np.rint(fi).astype(np.intp), np.rint(fj).astype(np.intp)]
    if interp != "bilinear":
        raise ValueError(f"unknown interpolation {interp!r}")
    i0 = np.clip(np.floor(fi), 0, max(g.n1 - 2, 0)).astype(np.intp)
    j0 = np.clip(np.floor(fj), 0, max(g.n2 - 2, 0)).astype(np.intp)
    i1 = np.minimum(i0 + 1, g.n1 - 1)
    j1 = np.minimum(j0 + 1, g.n2 - 1)
    wx = fi - i0
    wy = fj - j0
    return ((1.0 - wx) * (1.0 - wy) * vals[i0, j0] + wx * (1.0 - wy) * vals[i1, j0]
            + (1.0 - wx) * wy * vals[i0, j1] + wx * wy * vals[i1, j1])


def window_extract(big: SpatialField, offset, out_grid: Grid2D,
                   interp: str = "bilinear") -> SpatialField:
    """Resample ``big`` at ``coord(out) + offset`` onto ``out_grid``."""
    s1, s2 = out_grid.coords()
    return SpatialField(out_grid, sample(big, s1 + offset[0], s2 + offset[1], interp))
