"""
Covariance of a frozen Gaussian field
=====================================

A Gaussian field moved rigidly keeps its spatial covariance, shifted along
the velocity: cov(Z(s, t), Z(s + h, t + tau)) = c(h - v tau).
"""
import numpy as np

from travelfield import presets, run_ensemble
from travelfield.diagnostics import empirical_cov, frozen_covariance

cfg = presets.get("frozen_gauss")   # truncated exponential, range 4, v = (1, 0)
ens = run_ensemble(cfg, 300)

lags = [(0, 0), (1, 0), (2, 0), (0, 1)]
est = empirical_cov(ens, lags, [0, 1, 2])
theory = frozen_covariance(cfg.spectrum, lags, [0, 1, 2], cfg.velocity.v)

for i, h in enumerate(lags):
    for j, tau in enumerate([0, 1, 2]):
        print(f"h={h} tau={tau}: {est.values[i, j]: .3f} +- {est.std_errors[i, j]:.3f}"
              f"   theory {theory[i, j]: .3f}")

# waiting one step looks like moving one cell downstream
a, _ = est.at((1, 0), 0)
b, _ = est.at((0, 0), 1)
print("c(v, 0) =", round(a, 4), " c(0, 1) =", round(b, 4))
