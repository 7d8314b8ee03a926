"""Analytic and tabulated velocity fields ``v(s, t)`` driving evolving fields.

All catalog flows are written about a ``center`` (default the origin), with
``r = ||s - center||``:

========== ==========================================
kind       v(s, t)
========== ==========================================
uniform    ``v``
stagnation ``(k s1, -k s2)``
rigid_rotation ``(-k s2, k s1)``
vortex     ``(-k s2 / r, k s1 / r)``
source_sink ``(k s1 / r, k s2 / r)``
spiral     ``R(s) (cos t, sin t) / (t + 1)``, ``R(s) = radius_scale * r``
custom     linear interpolation of a table over ``(t, s1, s2)``
========== ==========================================
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import FlowDomainError

KINDS = ("uniform", "stagnation", "rigid_rotation", "vortex", "source_sink", "spiral", "custom")
_SINGULAR_VELOCITY = ("vortex", "source_sink")


@dataclass(frozen=True)
class FlowTable:
    """Gridded velocities ``v[t, i, j, :]`` at times ``t`` and axes ``x``, ``y``."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        shape = (len(self.t), len(self.x), len(self.y), 2)
        if np.shape(self.v) != shape:
            raise ValueError(f"table shape {np.shape(self.v)} != {shape}")


@dataclass(frozen=True)
class FlowField:
    kind: str
    k: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)
    v: tuple[float, float] = (0.0, 0.0)
    radius_scale: float = 0.5
    table: Optional[FlowTable] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown flow kind {self.kind!r}; choose from {KINDS}")
        if self.kind == "custom" and self.table is None:
            raise ValueError("custom flow needs a table")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "v", (float(self.v[0]), float(self.v[1])))
        if self.table is not None:
            tb = self.table
            interp = [RegularGridInterpolator((tb.t, tb.x, tb.y), tb.v[..., c]) for c in (0, 1)]
            object.__setattr__(self, "_interp", interp)

    # -- constructors -----------------------------------------------------
    @classmethod
    def uniform(cls, v):
        return cls("uniform", v=tuple(v))

    @classmethod
    def spiral(cls, radius_scale=0.5, center=(0.0, 0.0)):
        return cls("spiral", radius_scale=radius_scale, center=center)

    @classmethod
    def tabulated(cls, t, x, y, v):
        return cls("custom", table=FlowTable(np.asarray(t, float), np.asarray(x, float),
                                             np.asarray(y, float), np.asarray(v, float)))

    # -- evaluation -------------------------------------------------------
    @property
    def steady(self) -> bool:
        return self.kind not in ("spiral", "custom")

    def singular_points(self):
        """Points where the velocity itself is undefined."""
        return [self.center] if self.kind in _SINGULAR_VELOCITY else []

    def velocity(self, s1, s2, t):
        """Velocity components ``(v1, v2)`` broadcast over ``s1, s2, t``."""
        s1 = np.asarray(s1, dtype=float)
        s2 = np.asarray(s2, dtype=float)
        t = np.asarray(t, dtype=float)
        shape = np.broadcast(s1, s2, t).shape
        x = s1 - self.center[0]
        y = s2 - self.center[1]
        k = self.k
        if self.kind == "uniform":
            return np.full(shape, self.v[0]), np.full(shape, self.v[1])
        if self.kind == "stagnation":
            return np.broadcast_to(k * x, shape).copy(), np.broadcast_to(-k * y, shape).copy()
        if self.kind == "rigid_rotation":
            return np.broadcast_to(-k * y, shape).copy(), np.broadcast_to(k * x, shape).copy()
        if self.kind in _SINGULAR_VELOCITY:
            r = np.hypot(x, y)
            if np.any(r == 0):
                raise FlowDomainError(f"{self.kind} flow is singular at {self.center}")
            if self.kind == "vortex":
                return np.broadcast_to(-k * y / r, shape).copy(), np.broadcast_to(k * x / r, shape).copy()
            return np.broadcast_to(k * x / r, shape).copy(), np.broadcast_to(k * y / r, shape).copy()
        if self.kind == "spiral":
            R = self.radius_scale * np.hypot(x, y)
            g = R / (t + 1.0)
            return np.broadcast_to(g * np.cos(t), shape).copy(), np.broadcast_to(g * np.sin(t), shape).copy()
        pts = np.stack(np.broadcast_arrays(t, s1, s2), axis=-1).reshape(-1, 3)
        return self._interp[0](pts).reshape(shape), self._interp[1](pts).reshape(shape)

    def jacobian(self, s, t, step: float = 1e-5):
        """Spatial Jacobian ``D_s`` (2x2) and time derivative ``D_t`` at one point.

        ``D_s[a, b] = d v_a / d s_b``.  Analytic for catalog flows, central
        differences for tabulated ones.
        """
        x = float(s[0]) - self.center[0]
        y = float(s[1]) - self.center[1]
        k = self.k
        t = float(t)
        zero = np.zeros(2)
        if self.kind == "uniform":
            return np.zeros((2, 2)), zero
        if self.kind == "stagnation":
            return np.array([[k, 0.0], [0.0, -k]]), zero
        if self.kind == "rigid_rotation":
            return np.array([[0.0, -k], [k, 0.0]]), zero
        if self.kind == "custom":
            return self.numeric_jacobian(s, t, step)
        r = np.hypot(x, y)
        if r == 0:
            raise FlowDomainError(f"{self.kind} flow is not differentiable at {self.center}")
        r3 = r ** 3
        if self.kind == "vortex":
            return k * np.array([[x * y / r3, -x * x / r3], [y * y / r3, -x * y / r3]]), zero
        if self.kind == "source_sink":
            return k * np.array([[1 / r - x * x / r3, -x * y / r3],
                                 [-x * y / r3, 1 / r - y * y / r3]]), zero
        # spiral
        c = self.radius_scale
        u = np.array([np.cos(t), np.sin(t)])
        ds = np.outer(u / (t + 1.0), c * np.array([x, y]) / r)
        du = np.array([-np.sin(t), np.cos(t)]) / (t + 1.0) - u / (t + 1.0) ** 2
        return ds, c * r * du

    def numeric_jacobian(self, s, t, step: float = 1e-5):
        """Central-difference Jacobian, independent of the analytic formulas."""
        s1, s2 = float(s[0]), float(s[1])
        ds = np.empty((2, 2))
        for b, (e1, e2) in enumerate(((step, 0.0), (0.0, step))):
            vp = self.velocity(s1 + e1, s2 + e2, t)
            vm = self.velocity(s1 - e1, s2 - e2, t)
            ds[:, b] = [(vp[a] - vm[a]) / (2 * step) for a in (0, 1)]
        vp = self.velocity(s1, s2, t + step)
        vm = self.velocity(s1, s2, t - step)
        dt = np.array([(vp[a] - vm[a]) / (2 * step) for a in (0, 1)], dtype=float).ravel()
        return ds, dt

    # -- serialization ----------------------------------------------------
    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "uniform":
            d["v"] = list(self.v)
        elif self.kind == "spiral":
            d["radius_scale"] = self.radius_scale
            d["center"] = list(self.center)
        elif self.kind == "custom":
            tb = self.table
            d["table"] = {"t": tb.t.tolist(), "x": tb.x.tolist(), "y": tb.y.tolist(),
                          "v": tb.v.tolist()}
        else:
            d["k"] = self.k
            d["center"] = list(self.center)
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        if kind == "custom":
            tb = d["table"]
            return cls.tabulated(tb["t"], tb["x"], tb["y"], tb["v"])
        return cls(kind, k=float(d.get("k", 1.0)), center=tuple(d.get("center", (0.0, 0.0))),
                   v=tuple(d.get("v", (0.0, 0.0))), radius_scale=float(d.get("radius_scale", 0.5)))
