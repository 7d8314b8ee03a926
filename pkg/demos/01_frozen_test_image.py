"""
A rectangle carried by a constant wind
======================================

The simplest traveling field: draw one large image, then cut a window out of
it at a different offset for every frame.
"""
import numpy as np

from travelfield import presets, run_scenario
from travelfield.io import write_spacetime

# the fig2 scenario: a faded rectangle moving at 10 cells per step for 8 steps
cfg = presets.get("fig2")
res = run_scenario(cfg)
print("extended grid:", res.big.grid.n1, "cells, planner asked for", res.plan.N_required)

# frame t is frame 0 pushed 10 t cells along axis 1
F = res.field.frames
for t in (1, 4, 8):
    print(t, np.array_equal(F[t][10 * t:], F[0][:-10 * t]))

# frames plus a JSON sidecar, and 8-bit previews for any image viewer
side = write_spacetime("out_fig2", res.field, config=cfg, plan=res.plan, big_grid=res.big.grid,
                       formats=("bin", "pgm"))
print("wrote", len(side["frames"]), "frames to out_fig2/")
