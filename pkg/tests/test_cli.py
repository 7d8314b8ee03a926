import json

import numpy as np
import pytest

from travelfield import presets
from travelfield.bench import BenchResult, fit_slopes, run_case
from travelfield.cli import main
from travelfield.io import read_spacetime


def _write_cfg(tmp_path, cfg_dict, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg_dict))
    return str(p)


def test_presets_list(capsys):
    assert main(["presets", "list"]) == 0
    out = capsys.readouterr().out
    for name in ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6"):
        assert name in out
    assert main(["presets", "show", "fig2"]) == 0
    assert json.loads(capsys.readouterr().out)["velocity"]["v"] == [10.0, 0.0]


def test_simulate_fig2(tmp_path, capsys):
    assert main(["simulate", "--preset", "fig2", "--out", str(tmp_path), "--format", "bin"]) == 0
    assert "N_required" in capsys.readouterr().out
    f = read_spacetime(tmp_path)
    assert f.frames.shape == (9, 150, 150)
    assert np.array_equal(f.frames[3][30:], f.frames[0][:-30])


def test_simulate_fig6_stores_velocity_grids(tmp_path):
    assert main(["simulate", "--preset", "fig6", "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("frame_*.tfld"))) == 9
    assert len(list(tmp_path.glob("velocity_*_v1.tfld"))) == 9


def test_simulate_is_deterministic_and_seed_overrides(tmp_path):
    for d in ("a", "b"):
        assert main(["simulate", "--preset", "frozen_gauss", "--out", str(tmp_path / d)]) == 0
    assert main(["simulate", "--preset", "frozen_gauss", "--seed", "9", "--out", str(tmp_path / "c")]) == 0
    a, b, c = (read_spacetime(tmp_path / d) for d in "abc")
    assert (tmp_path / "a" / "frame_002.tfld").read_bytes() == (tmp_path / "b" / "frame_002.tfld").read_bytes()
    assert not np.array_equal(a.frames, c.frames)


def test_simulate_single_frame_any_velocity(tmp_path):
    d = presets.get("frozen_gauss").to_dict()
    d.update(epochs=0, velocity={"kind": "rotation_mixture", "n_theta": 3, "phase_mu": 0.0, "phase_sigma": 1.0,
                                 "trans_mu": [1.0, 0.0], "trans_cov": [[1, 0], [0, 1]], "c0": [16, 16]})
    assert main(["simulate", "--config", _write_cfg(tmp_path, d), "--out", str(tmp_path / "o")]) == 0
    assert read_spacetime(tmp_path / "o").frames.shape == (1, 32, 32)


def test_ensemble_writes_members(tmp_path):
    assert main(["simulate", "--preset", "white", "--ensemble", "2", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "member_0001" / "sidecar.json").exists()


def test_exit_codes(tmp_path, capsys):
    d = presets.get("fig2").to_dict()
    d["epochs"] = "many"
    assert main(["simulate", "--config", _write_cfg(tmp_path, d)]) == 2
    assert "epochs" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["simulate", "--preset", "nope"]) == 2

    d = presets.get("fig2").to_dict()
    d["extended_grid_override"] = 200
    assert main(["simulate", "--config", _write_cfg(tmp_path, d), "--out", str(tmp_path / "p")]) == 3
    assert "extended_grid_override" in capsys.readouterr().err

    d = presets.get("frozen_gauss").to_dict()
    d["velocity"] = {"kind": "gaussian_random", "mu": [2.0, 0.0], "cov": [[1, 0], [0, 1]], "redraw": "once"}
    d["epochs"] = 5
    codes = [main(["simulate", "--config", _write_cfg(tmp_path, d), "--seed", str(s),
                   "--out", str(tmp_path / "r")]) for s in range(60)]
    assert 4 in codes and set(codes) <= {0, 4}


def test_diagnose_verdicts(tmp_path, capsys):
    assert main(["diagnose", "--preset", "white", "--check", "periodogram", "--ensemble", "50",
                 "--out", str(tmp_path)]) == 0
    v = json.loads((tmp_path / "verdicts.json").read_text())[0]
    assert set(v) >= {"check", "statistic", "threshold", "pass"} and v["pass"]
    assert main(["diagnose", "--preset", "frozen_gauss", "--check", "taylor", "--check", "cov-match",
                 "--ensemble", "300", "--out", str(tmp_path / "f")]) == 0
    rows = (tmp_path / "f" / "cov-match.csv").read_text().splitlines()
    assert rows[0] == "h1,h2,tau,value,std_error,theory" and len(rows) == 1 + 49 * 3
    assert main(["diagnose", "--preset", "white", "--check", "path", "--ensemble", "4"]) == 2
    assert main(["diagnose", "--preset", "white", "--ensemble", "1"]) == 2


def test_diagnose_failing_check(tmp_path):
    # two realizations and single-bin blocks cannot pin the periodogram to 25%
    d = presets.get("white").to_dict()
    d.update(grid={"n1": 10, "n2": 10}, epochs=4)
    assert main(["diagnose", "--config", _write_cfg(tmp_path, d), "--check", "periodogram",
                 "--ensemble", "2"]) == 5


def test_bench_cli(tmp_path, capsys):
    assert main(["bench", "--grid-list", "8,40", "--epoch-list", "2", "--methods",
                 "window_shift,spectral3d,cholesky", "--repeats", "3", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "slope window_shift" in out
    rows = (tmp_path / "bench.csv").read_text().splitlines()
    assert rows[0].startswith("method,n,T,wall_time_s,peak_bytes,repeats")
    assert any(r.startswith("cholesky,8,2") for r in rows)
    assert not any(r.startswith("cholesky,40") for r in rows)
    assert main(["bench", "--grid-list", "64", "--epoch-list", "8", "--budget", "1e-9",
                 "--out", str(tmp_path)]) == 6
    assert main(["bench", "--methods", "magic"]) == 2


def test_bench_result_invariants():
    with pytest.raises(ValueError):
        BenchResult("window_shift", 8, 2, 0.0, 1, 3)
    with pytest.raises(ValueError):
        BenchResult("window_shift", 8, 2, 1.0, 1, 2)
    r = run_case("window_shift", 16, 2, repeats=3)
    assert r.wall_time_s > 0 and r.peak_bytes > 0
    rows = [BenchResult("spectral3d", n, 4, 1e-3 * n ** 2, 1, 3) for n in (8, 16, 32)]
    assert fit_slopes(rows)[("spectral3d", 4)] == pytest.approx(2.0)
