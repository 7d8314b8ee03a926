"""
Many velocities at once
=======================

Averaging windows moved by several velocities blurs the rectangle along the
spread of directions; rotating windows about a drifting center swirls it.
"""
import numpy as np

from travelfield import presets, run_scenario

mix = run_scenario(presets.get("fig4"))
meta = mix.field.metadata
for v, w in zip(meta["velocities"], meta["weights"]):
    print(f"v=({v[0]:6.2f}, {v[1]:6.2f})  weight {w:.3f}")

rot = run_scenario(presets.get("fig5"))
for k, fr in enumerate(rot.field.metadata["frames"][:4]):
    print(f"frame {k}: center ({fr['center'][0]:.2f}, {fr['center'][1]:.2f}), "
          f"{len(fr['thetas'])} angles")

# the rectangle drifts downstream, so less of it stays inside the window
print("mixture frame sums:", np.round(mix.field.frames.sum(axis=(1, 2))[[0, 4, 8]], 1))
