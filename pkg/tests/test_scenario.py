import numpy as np
import pytest

from travelfield import presets
from travelfield.config import ScenarioConfig, TestImage
from travelfield.errors import PlanningError
from travelfield.grid import Grid2D
from travelfield.scenario import render_test_image, run_ensemble, run_scenario, worker_count
from travelfield.velocity import Constant


def test_worker_count_cap(monkeypatch):
    monkeypatch.setenv("TRAVELFIELD_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.delenv("TRAVELFIELD_THREADS")
    assert worker_count(3) == 3


def test_ensemble_independent_of_worker_count():
    cfg = presets.get("frozen_gauss")
    a = run_ensemble(cfg, 6, workers=1)
    b = run_ensemble(cfg, 6, workers=4)
    for x, y in zip(a, b):
        assert np.array_equal(x.frames, y.frames)
    assert not np.array_equal(a[0].frames, a[1].frames)


def test_test_image_profile():
    window = Grid2D.square(150)
    img = render_test_image(Grid2D(600, 600, 1.0, (-225.0, -225.0)), TestImage(), window)
    v = img.values
    c = 225 + 74  # cell nearest the window center (74.5, 74.5)
    assert v[c, c] == 1.0 and v.min() == 0.0
    assert v[0, 0] == 0.0
    # ramps linearly over the fade width along axis 1 (half size 35)
    row = v[c, c:c + 45]
    assert np.all(np.diff(row) <= 0)


def test_override_below_requirement():
    cfg = ScenarioConfig(grid=Grid2D.square(20), epochs=4, velocity=Constant((3.0, 0.0)),
                         base=TestImage(), extended_grid_override=25)
    with pytest.raises(PlanningError, match="extended_grid_override"):
        run_scenario(cfg)


def test_fig4_velocities_resolved_once():
    res = run_scenario(presets.get("fig4"))
    vel = np.asarray(res.field.metadata["velocities"])
    assert vel.shape == (10, 2)
    assert abs(np.median(np.hypot(vel[:, 0], vel[:, 1])) - 10) < 3
    assert res.big.grid.n1 == 600


def test_spectral_route_has_no_plan():
    res = run_scenario(presets.get("fig3"))
    assert res.plan is None and res.field.frames.shape == (5, 150, 150)
