"""Named scenarios: the figure set and small diagnostic setups."""
from __future__ import annotations

import warnings

from .config import GaussianBase, ScenarioConfig, TestImage
from .flows import FlowField
from .grid import Grid2D
from . import spectra as sp
from .velocity import Constant, Field, RotationMixture, SampledMixture

FIG_N = 600
FIG_n = 150
FIG_T = 8


def _spectral(delta_kind: str):
    spatial = sp.PowerLaw(5.0)
    v = (10.0, 0.0)
    with warnings.catch_warnings():
        # delta = 2 lies outside the integrable range; kept on purpose
        warnings.simplefilter("ignore")
        if delta_kind == "op":
            return sp.OrientPersistent(spatial, v, 2.0)
        if delta_kind == "damped":
            return sp.Damped(spatial, v, 2.0, 1.0)
        return sp.FreqDamped(spatial, v, 2.0, 1.0)


def _figure(name, T, velocity, **kw):
    return ScenarioConfig(grid=Grid2D.square(FIG_n), epochs=T, velocity=velocity,
                          extended_grid_override=FIG_N, base=TestImage(), name=name, **kw)


def _fig1():
    return _figure("fig1", 0, Constant((0.0, 0.0)))


def _fig2():
    return _figure("fig2", FIG_T, Constant((10.0, 0.0)))


def _fig3(kind):
    def build():
        return ScenarioConfig(grid=Grid2D.square(FIG_n), epochs=4, spectrum=_spectral(kind),
                              name={"op": "fig3", "damped": "fig3_damped",
                                    "freq": "fig3_freqdamped"}[kind])
    return build


def _fig4():
    return _figure("fig4", FIG_T, SampledMixture((10.0, 0.0), 10, 0.5, 2.0))


def _fig5():
    vel = RotationMixture(20, 0.0, 5.0, (5.0, 0.0), ((1.0, 0.0), (0.0, 1.0)), (75.0, 105.0))
    return _figure("fig5", FIG_T, vel)


def _fig6():
    return _figure("fig6", FIG_T, Field(FlowField.spiral(0.5, center=(75.0, 75.0))))


def _frozen_gauss():
    return ScenarioConfig(grid=Grid2D.square(32), epochs=4,
                          spectrum=sp.CompactCovariance(20.0, 4.0), velocity=Constant((1.0, 0.0)),
                          base=GaussianBase(), name="frozen_gauss")


def _white():
    return ScenarioConfig(grid=Grid2D.square(32), epochs=15, spectrum=sp.Flat(1.0), name="white")


def _damped():
    return ScenarioConfig(grid=Grid2D.square(32), epochs=15, spectrum=_spectral("damped"),
                          name="damped")


def _spiral_gauss():
    # window centered on the spiral so small-lag linearization holds near the probes
    return ScenarioConfig(grid=Grid2D(24, 24, 1.0, (-12.0, -12.0)), epochs=2,
                          spectrum=sp.CompactCovariance(20.0, 4.0),
                          velocity=Field(FlowField.spiral(0.5)), name="spiral_gauss")


_BUILDERS = {
    "fig1": (_fig1, "test image at rest (single frame)"),
    "fig2": (_fig2, "frozen field, v=(10,0), test image"),
    "fig3": (_fig3("op"), "orientationally persistent spectrum, spectral synthesis"),
    "fig3_damped": (_fig3("damped"), "damped spectrum, h=1"),
    "fig3_freqdamped": (_fig3("freq"), "frequency-damped spectrum, a=1"),
    "fig4": (_fig4, "distributed frozen field, 10 sampled velocities around (10,0)"),
    "fig5": (_fig5, "rotation mixture, 20 angles per frame, drifting center"),
    "fig6": (_fig6, "evolving field driven by a spiral velocity field"),
    "frozen_gauss": (_frozen_gauss, "Gaussian frozen field for covariance checks"),
    "white": (_white, "space-time white noise"),
    "damped": (_damped, "damped spectrum on a 32x32x16 grid"),
    "spiral_gauss": (_spiral_gauss, "Gaussian evolving field about a spiral center"),
}

NAMES = tuple(_BUILDERS)


def describe(name: str) -> str:
    return _BUILDERS[name][1]


def get(name: str) -> ScenarioConfig:
    try:
        return _BUILDERS[name][0]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(NAMES)}") from None
