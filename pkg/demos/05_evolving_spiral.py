"""
A field warped by a spiral wind
===============================

Each cell reads the base field at s - v(s, t) t.  For small lags the
correlation peak follows the path predicted from the flow's Jacobian.
"""
import numpy as np

from travelfield import presets, run_ensemble, run_scenario
from travelfield.cli import check_path
from travelfield.diagnostics import flow_divergence_curl

res = run_scenario(presets.get("fig6"))
print("frames", res.field.frames.shape, "velocity grids", res.field.metadata["velocity_grids"].shape)

flow = presets.get("fig6").velocity.flow
print("divergence, curl at (100, 75), t=2:", flow_divergence_curl(flow, (100.0, 75.0), 2.0))

cfg = presets.get("spiral_gauss")
verdict = check_path(cfg, run_ensemble(cfg, 2000))
for p in verdict["probes"][:5]:
    print("s", p["s"], "predicted", np.round(p["predicted"], 2), "observed", np.round(p["observed"], 2))
print("worst error %.2f cells" % verdict["statistic"])
