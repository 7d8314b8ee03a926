"""Serializable scenario configuration (JSON)."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import ConfigError
from .grid import Grid2D
from . import spectra as sp
from .velocity import velocity_from_dict, velocity_to_dict

INTERP = ("bilinear", "nearest")
FORMATS = ("bin", "pgm", "csv")


def spectrum_to_dict(spec) -> dict:
    if isinstance(spec, sp.Flat):
        return {"kind": spec.kind, "level": spec.level}
    if isinstance(spec, sp.PowerLaw):
        return {"kind": spec.kind, "alpha": spec.alpha}
    if isinstance(spec, sp.CompactCovariance):
        return {"kind": spec.kind, "base": spec.base, "h0": spec.h0, "scale": spec.scale,
                "variance": spec.variance}
    d = {"kind": spec.kind, "spatial": spectrum_to_dict(spec.spatial), "v": list(spec.v)}
    for name in ("delta", "h", "a"):
        if hasattr(spec, name):
            d[name] = getattr(spec, name)
    return d


def spectrum_from_dict(d: dict):
    kind = d["kind"]
    if kind == "flat":
        return sp.Flat(float(d.get("level", 1.0)))
    if kind == "power_law":
        return sp.PowerLaw(float(d["alpha"]))
    if kind == "compact":
        return sp.CompactCovariance(float(d["h0"]), float(d.get("scale", 1.0)),
                                    d.get("base", "exponential"), float(d.get("variance", 1.0)))
    spatial = spectrum_from_dict(d["spatial"])
    v = tuple(d["v"])
    if kind == "frozen_delta":
        return sp.FrozenDelta(spatial, v)
    if kind == "orient_persistent":
        return sp.OrientPersistent(spatial, v, float(d["delta"]))
    if kind == "damped":
        return sp.Damped(spatial, v, float(d["delta"]), float(d["h"]))
    if kind == "freq_damped":
        return sp.FreqDamped(spatial, v, float(d["delta"]), float(d["a"]))
    raise ValueError(f"unknown spectrum kind {kind!r}")


@dataclass(frozen=True)
class TestImage:
    """Faded rectangle on a zero background.

    The value is 1 (times ``amplitude``) deeper than ``fade`` inside the
    rectangle, ramps linearly to 0 at its edge and is 0 outside.  ``center``
    defaults to the middle of the target window.
    """

    half_size: tuple[float, float] = (50.0, 35.0)
    fade: float = 20.0
    amplitude: float = 1.0
    center: Optional[tuple[float, float]] = None
    kind = "test_image"

    __test__ = False

    def to_dict(self):
        return {"kind": self.kind, "half_size": list(self.half_size), "fade": self.fade,
                "amplitude": self.amplitude,
                "center": None if self.center is None else list(self.center)}


@dataclass(frozen=True)
class GaussianBase:
    """Gaussian base field drawn by circulant embedding of the scenario spectrum."""

    min_embedding: Optional[int] = None
    kind = "gaussian"

    def to_dict(self):
        return {"kind": self.kind, "min_embedding": self.min_embedding}


def base_from_dict(d: dict):
    if d["kind"] == "test_image":
        c = d.get("center")
        return TestImage(tuple(map(float, d.get("half_size", (50.0, 35.0)))), float(d.get("fade", 20.0)),
                         float(d.get("amplitude", 1.0)), None if c is None else tuple(map(float, c)))
    if d["kind"] == "gaussian":
        m = d.get("min_embedding")
        return GaussianBase(None if m is None else int(m))
    raise ValueError(f"unknown base kind {d['kind']!r}")


@dataclass(frozen=True)
class OutputOptions:
    formats: tuple[str, ...] = ("bin",)
    directory: Optional[str] = None

    def __post_init__(self):
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise ValueError(f"unknown output formats {bad}; choose from {FORMATS}")
        object.__setattr__(self, "formats", tuple(self.formats))


@dataclass(frozen=True)
class ScenarioConfig:
    grid: Grid2D
    epochs: int
    spectrum: object = None
    velocity: object = None
    seed: int = 0
    dt: float = 1.0
    extended_grid_override: Optional[int] = None
    base: object = field(default_factory=GaussianBase)
    interp: str = "bilinear"
    output: OutputOptions = field(default_factory=OutputOptions)
    name: str = "scenario"

    def __post_init__(self):
        if isinstance(self.epochs, bool) or not isinstance(self.epochs, (int, float)) \
                or int(self.epochs) != self.epochs or self.epochs < 0:
            raise ConfigError(f"epochs: must be a nonnegative integer, got {self.epochs!r}")
        object.__setattr__(self, "epochs", int(self.epochs))
        if not isinstance(self.dt, (int, float)) or not self.dt > 0:
            raise ConfigError(f"dt: must be positive, got {self.dt!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not (0 <= self.seed < 2 ** 64):
            raise ConfigError(f"seed: must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.extended_grid_override is not None and int(self.extended_grid_override) < 1:
            raise ConfigError("extended_grid_override: must be a positive integer")
        if self.interp not in INTERP:
            raise ConfigError(f"interp: must be one of {INTERP}")
        if self.is_spectral:
            return
        if self.velocity is None:
            raise ConfigError("velocity: required unless the spectrum is a space-time spectrum")
        if isinstance(self.base, GaussianBase) and not isinstance(self.spectrum, sp.SPATIAL_KINDS):
            raise ConfigError("spectrum: a Gaussian base field needs a spatial spectrum "
                              "(flat, power_law or compact)")

    @property
    def is_spectral(self) -> bool:
        """True when the field is synthesized directly from a space-time spectrum."""
        if isinstance(self.spectrum, (sp.FrozenDelta, sp.OrientPersistent, sp.Damped, sp.FreqDamped)):
            return True
        return isinstance(self.spectrum, sp.Flat) and self.velocity is None

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "grid": self.grid.to_dict(),
            "epochs": int(self.epochs),
            "dt": self.dt,
            "seed": int(self.seed),
            "spectrum": None if self.spectrum is None else spectrum_to_dict(self.spectrum),
            "velocity": None if self.velocity is None else velocity_to_dict(self.velocity),
            "extended_grid_override": self.extended_grid_override,
            "base": self.base.to_dict(),
            "interp": self.interp,
            "output": {"formats": list(self.output.formats), "directory": self.output.directory},
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def scenario_hash(self) -> str:
        canon = dict(self.to_dict(), output=None)
        return hashlib.sha256(json.dumps(canon, sort_keys=True).encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        def part(name, fn, default=None):
            if name not in d or d[name] is None:
                return default
            try:
                return fn(d[name])
            except ConfigError:
                raise
            except (KeyError, ValueError, TypeError, IndexError) as err:
                raise ConfigError(f"{name}: {err}") from err

        if "grid" not in d:
            raise ConfigError("grid: missing")
        if "epochs" not in d:
            raise ConfigError("epochs: missing")
        out = d.get("output") or {}
        try:
            output = OutputOptions(tuple(out.get("formats", ("bin",))), out.get("directory"))
        except (ValueError, TypeError) as err:
            raise ConfigError(f"output: {err}") from err
        override = d.get("extended_grid_override")
        try:
            return cls(
                grid=part("grid", Grid2D.from_dict),
                epochs=d["epochs"],
                spectrum=part("spectrum", spectrum_from_dict),
                velocity=part("velocity", velocity_from_dict),
                seed=int(d.get("seed", 0)),
                dt=float(d.get("dt", 1.0)),
                extended_grid_override=None if override is None else int(override),
                base=part("base", base_from_dict, GaussianBase()),
                interp=d.get("interp", "bilinear"),
                output=output,
                name=str(d.get("name", "scenario")),
            )
        except ConfigError:
            raise
        except (ValueError, TypeError) as err:
            raise ConfigError(str(err)) from err

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"invalid JSON: {err}") from err
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())
