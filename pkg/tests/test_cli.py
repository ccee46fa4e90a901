import json
import os
import subprocess
import sys

import pytest

from fraclift import __version__
from fraclift.cli import main
from fraclift.export import sha256

from conftest import SCENES_DIR as SCENES


def _scene(tmp_path, text, name="s.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


DISK = """
region: {dimension: 2, primitives: [{type: disk, center: [0, 0], r: 1}]}
grid: {resolution: 64}
analyses: [{kind: components}, {kind: euler}]
output: {formats: [json, obj]}
"""


def test_validate_ok(capsys):
    assert main(["validate", "--scene", str(SCENES / "disk.yaml")]) == 0


def test_negative_resolution_names_the_field(tmp_path, capsys):
    bad = _scene(tmp_path, DISK.replace("resolution: 64", "resolution: -4"))
    assert main(["validate", "--scene", str(bad)]) == 2
    assert "grid.resolution" in capsys.readouterr().err


@pytest.mark.parametrize("edit,path", [
    (("r: 1", "r: 0"), "region.primitives.0.r"),
    (("type: disk", "type: hexagon"), "region.primitives.0"),
    (("dimension: 2", "dimension: 1"), "region.primitives.0"),
    (("{kind: euler}", "{kind: euler, extra: 1}"), "analyses.1.extra"),
])
def test_validation_paths(tmp_path, capsys, edit, path):
    bad = _scene(tmp_path, DISK.replace(*edit))
    assert main(["validate", "--scene", str(bad)]) == 2
    assert path in capsys.readouterr().err


def test_odd_t_resolution_is_invalid(tmp_path, capsys):
    bad = _scene(tmp_path, DISK + "lift: {t_resolution: 7}\n")
    assert main(["run", "--scene", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "lift.t_resolution" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_run_disk(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--scene", str(_scene(tmp_path, DISK)), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["version"] == __version__
    assert rep["1_euler"]["total"] == 2
    assert rep["0_components"]["bijection"] is True
    man = json.loads((out / "manifest.json").read_text())
    assert set(man["artifacts"]) == {"report.json", "lifted_boundary.obj"}
    for name, entry in man["artifacts"].items():
        assert entry["sha256"] == sha256(out / name)
    assert not [p for p in out.iterdir() if p.name.startswith(".staging")]


def test_run_cantor5(tmp_path):
    out = tmp_path / "c"
    assert main(["run", "--scene", str(SCENES / "cantor5.yaml"), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    comp = rep["0_components"]
    assert comp["exact"] == comp["base"] == comp["lifted"] == 31
    assert comp["mesh"] == 1
    assert (out / "occupancy.ulift").exists()


def test_runs_are_byte_identical(tmp_path):
    scene = _scene(tmp_path, DISK)
    for o in ("a", "b"):
        assert main(["run", "--scene", str(scene), "--out", str(tmp_path / o)]) == 0
    for name in ("report.json", "manifest.json", "lifted_boundary.obj"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_export_field(tmp_path, capsys):
    out = tmp_path / "e"
    assert main(["export", "--scene", str(_scene(tmp_path, DISK)), "--what", "field", "--out", str(out)]) == 0
    assert (out / "distance.csv").exists()
    assert not (out / "report.json").exists()


def test_numerical_flag_exits_3(tmp_path):
    # at this tolerance the lifted rhombus spectrum has a wider gap above the cut
    scene = _scene(tmp_path, """
region: {dimension: 1, primitives: [{type: interval, a: 0, b: 1}]}
grid: {resolution: 512}
lift: {regularize_epsilon: 0.2}
analyses: [{kind: operators, symbol: 2, N: 64, tol: 1.0e-8}]
output: {formats: [json]}
""")
    out = tmp_path / "f"
    assert main(["run", "--scene", str(scene), "--out", str(out)]) == 3
    assert json.loads((out / "report.json").read_text())["flags"]


def test_missing_scene_is_invalid(tmp_path, capsys):
    assert main(["validate", "--scene", str(tmp_path / "nope.yaml")]) == 2


def test_console_script_and_thread_cap(tmp_path):
    env = dict(os.environ, LIFT_THREADS="1")
    r = subprocess.run([sys.executable, "-m", "fraclift.cli", "--version"], capture_output=True, text=True, env=env)
    assert r.returncode == 0 and r.stdout.strip() == __version__
    env["LIFT_THREADS"] = "many"
    r = subprocess.run([sys.executable, "-m", "fraclift.cli", "--version"], capture_output=True, text=True, env=env)
    assert r.returncode != 0 and "LIFT_THREADS" in r.stderr
