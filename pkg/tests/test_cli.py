import csv
import io
import json
import subprocess
import sys

import pytest

from crowdsim import data
from crowdsim.cli import main
from crowdsim.geometry import load_scene, save_scene

from conftest import empty_room
from crowdsim.geometry import HumanSpec

CORRIDOR = str(data.scenes_dir() / "corridor_n10.json")
SMALL_SUITE = str(data.scenes_dir() / "suite" / "scene_1[89].json")
NAV = str(data.scenes_dir() / "nav_empty" / "empty_0[01].json")


@pytest.fixture
def tiny(tmp_path):
    scene = empty_room(humans=[HumanSpec(0, (2.0, 5.0), (8.0, 5.0)),
                               HumanSpec(1, (8.0, 2.0), (2.0, 2.0))])
    path = tmp_path / "tiny.json"
    save_scene(scene, path)
    return path


def run_cli(*argv, out=None):
    code = main([str(a) for a in argv])
    if out is not None:
        return code, out.read_text()
    return code, None


def test_gen_scenes(tmp_path):
    code, _ = run_cli("gen-scenes", "--count", 3, "--area", "10,40", "--seed", 4, "--out", tmp_path / "a")
    assert code == 0
    files = sorted((tmp_path / "a").glob("*.json"))
    assert [f.name for f in files] == ["scene_00.json", "scene_01.json", "scene_02.json"]
    for f in files:
        load_scene(f)
    run_cli("gen-scenes", "--count", 3, "--area", "10,40", "--seed", 4, "--out", tmp_path / "b")
    for f in files:
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_gen_scenes_fixed_density(tmp_path):
    from crowdsim.geometry import human_density

    assert run_cli("gen-scenes", "--count", 2, "--density", "0.189,0.189", "--area", "20,60",
                   "--out", tmp_path)[0] == 0
    for f in tmp_path.glob("*.json"):
        assert human_density(load_scene(f)) == pytest.approx(0.189, rel=1e-9)


def test_run_outputs(tiny, tmp_path):
    out = tmp_path / "r1"
    assert run_cli("run", "--scene", tiny, "--steps", 10, "--out", out)[0] == 0
    rows = list(csv.reader(io.StringIO((out / "trajectory.csv").read_text())))
    assert len(rows) == 1 + 10 * 2
    assert json.loads((out / "timing.json").read_text())
    out2 = tmp_path / "r2"
    run_cli("run", "--scene", tiny, "--steps", 10, "--out", out2)
    for name in ("trajectory.csv", "events.json"):
        assert (out / name).read_bytes() == (out2 / name).read_bytes()


def test_run_corridor_swaps(tmp_path):
    assert run_cli("run", "--scene", CORRIDOR, "--steps", 500, "--out", tmp_path, "--no-timing")[0] == 0
    events = json.loads((tmp_path / "events.json").read_text())["events"]
    assert sum(e["kind"] == "destination_swapped" for e in events) >= 10
    assert not (tmp_path / "timing.json").exists()


def test_eval_dynamics_csv(tmp_path):
    out = tmp_path / "d.csv"
    assert run_cli("eval-dynamics", "--scene-glob", SMALL_SUITE, "--steps", 60, "--format", "csv",
                   "--out", out)[0] == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [r["scene"] for r in rows] == ["scene_18", "scene_19", "aggregate"]
    assert float(rows[-1]["car"]) <= 100.0 and float(rows[-1]["mct_seconds"]) > 0


def test_eval_dynamics_json_and_jobs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run_cli("eval-dynamics", "--scene-glob", SMALL_SUITE, "--steps", 40, "--no-timing", "--out", a)
    run_cli("eval-dynamics", "--scene-glob", SMALL_SUITE, "--steps", 40, "--no-timing",
            "--jobs", 4, "--out", b)
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    assert {"car", "gr", "mct_seconds", "car_below_100", "scenes"} <= set(report)
    assert report["mct_seconds"] is None


def test_eval_dynamics_errors(tmp_path, tiny, capsys):
    assert run_cli("eval-dynamics", "--scene-glob", str(tmp_path / "none*.json"))[0] == 1
    assert "no scenes match" in capsys.readouterr().err
    assert run_cli("eval-dynamics", "--scene", tiny, "--steps", 0)[0] == 1


def test_bench_scaling_small(tmp_path):
    out = tmp_path / "b.csv"
    assert run_cli("bench-scaling", "--humans", "2,4", "--trials", 2, "--steps", 10, "--format", "csv",
                   "--out", out)[0] == 0
    head, tail = out.read_text().split("\n\n")
    rows = list(csv.DictReader(io.StringIO(head)))
    assert [int(r["n"]) for r in rows] == [2, 4]
    fit = next(csv.DictReader(io.StringIO(tail)))
    assert fit["degenerate"] == "False"


def test_bench_scaling_single_n_is_degenerate(tmp_path):
    out = tmp_path / "b.json"
    run_cli("bench-scaling", "--humans", "3", "--trials", 1, "--steps", 5, "--out", out)
    rep = json.loads(out.read_text())
    assert rep["fit"]["degenerate"] is True and rep["fit"]["r2"] is None


def test_bench_scaling_rejects_bad_counts(tmp_path):
    assert run_cli("bench-scaling", "--humans", "10,5", "--trials", 1, "--steps", 5)[0] == 1
    assert run_cli("bench-scaling", "--humans", "5", "--trials", 0, "--steps", 5)[0] == 1


def test_eval_nav(tmp_path):
    out, log = tmp_path / "n.json", tmp_path / "n.jsonl"
    assert run_cli("eval-nav", "--scene-glob", NAV, "--episodes", 2, "--log", log, "--out", out)[0] == 0
    rep = json.loads(out.read_text())
    assert rep["summary"]["episodes"] == 4 and rep["summary"]["sr"] == 1.0
    assert rep["policy"] == "greedy" and rep["r_collision"] == -1e-4
    lines = log.read_text().splitlines()
    assert sum("success" in json.loads(line) for line in lines) == 4


def test_eval_nav_rc_override_and_random(tmp_path):
    out = tmp_path / "n.csv"
    assert run_cli("eval-nav", "--scene-glob", NAV, "--episodes", 1, "--policy", "random",
                   "--rc", -0.01, "--format", "csv", "--out", out)[0] == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 2 and all(r["success"] == "False" for r in rows)


def test_unknown_policy(capsys):
    assert run_cli("eval-nav", "--scene-glob", NAV, "--policy", "oracle")[0] == 1
    assert "policy" in capsys.readouterr().err


def test_io_error_exit_code(tmp_path):
    assert run_cli("run", "--scene", tmp_path / "missing.json", "--steps", 1, "--out", tmp_path)[0] == 2


def test_invalid_scene_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 1, "name": "x"')
    assert run_cli("run", "--scene", bad, "--steps", 1, "--out", tmp_path)[0] == 1


def test_usage_error_exit_code():
    assert main(["run", "--steps", "abc"]) == 1
    assert main(["frobnicate"]) == 1


def test_config_file_with_flag_precedence(tmp_path, tiny):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"steps": 7, "no_timing": True, "params": {"sigma_zeta": 0.5}}))
    out = tmp_path / "run"
    assert run_cli("run", "--config", cfg, "--scene", tiny, "--out", out)[0] == 0
    assert len((out / "trajectory.csv").read_text().splitlines()) == 1 + 7 * 2
    assert not (out / "timing.json").exists()
    out2 = tmp_path / "run2"
    assert run_cli("run", "--config", cfg, "--scene", tiny, "--steps", 3, "--out", out2)[0] == 0
    assert len((out2 / "trajectory.csv").read_text().splitlines()) == 1 + 3 * 2


def test_config_rejects_unknown_keys(tmp_path, tiny):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"stepz": 7}))
    assert run_cli("run", "--config", cfg, "--scene", tiny, "--out", tmp_path)[0] == 1
    cfg.write_text(json.dumps({"params": {"warp": 1}}))
    assert run_cli("run", "--config", cfg, "--scene", tiny, "--out", tmp_path)[0] == 1


def test_console_entry_point(tiny, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "crowdsim.cli", "run", "--scene", str(tiny),
                           "--steps", "2", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
