"""Traveling space-time random fields built from one large spatial field."""
from .errors import *  # noqa: F401,F403
from .grid import Grid2D, SpatialField, SpaceTimeField, index_to_coord, coord_to_index, window_extract
from .spectra import (Flat, PowerLaw, CompactCovariance, FrozenDelta, OrientPersistent, Damped,
                      FreqDamped, eval_spatial, eval_spacetime, discretize_spectrum,
                      covariance_from_spectrum)
from .gaussian import RngStream, EmbeddingReport, simulate_spatial_circulant, simulate_spacetime_spectral
from .flows import FlowField
from .velocity import (Constant, GaussianRandom, Mixture, SampledMixture, RotationMixture, Field,
                       WrappedNormal, Normal)
from .traveling import (PlanReport, plan_extended_grid, frozen_field, random_velocity_field,
                        distributed_field, rotate_translate, rotation_mixture_field,
                        evolving_field, plane_wave)
from .diagnostics import (empirical_cov, periodogram3, propagation_path, correlation_peak,
                          cholesky_oracle)
from .config import ScenarioConfig, TestImage, GaussianBase
from .scenario import run_scenario, run_ensemble

__version__ = "0.1.0"
