import json
import subprocess
import sys

import pytest

from busecoarse.cli import main, parse_flags
from busecoarse.runner import COMMANDS, run


def invoke(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_parse_flags():
    assert parse_flags(["--space", "lp:2:2", "--samples=10", "--within-blocks", "--radii", "[1, 2]"]) == {
        "space": "lp:2:2",
        "samples": 10,
        "within_blocks": True,
        "radii": [1, 2],
    }
    with pytest.raises(ValueError):
        parse_flags(["stray"])


def test_busemann_check_passes(capsys):
    code, rep, _ = invoke(capsys, "busemann-check", "--space", "lp:2:2", "--samples", "1000")
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["result"]["min_margin"] >= -1e-9
    assert rep["config"]["seed"] == 0


def test_staircase_fails_with_witness(capsys):
    code, rep, err = invoke(capsys, "busemann-check", "--space", "raw-lp:1:2", "--include-staircase-geodesics")
    assert code == 4 and rep["verdict"] == "fail"
    w = rep["witnesses"][0] if isinstance(rep["witnesses"], list) else rep["witnesses"]
    text = json.dumps(w)
    assert "corner" in text and "x1" in text
    assert "verdict fail" in err


def test_kinv(capsys):
    code, rep, _ = invoke(capsys, "kinv", "--q", "0")
    assert code == 0 and rep["result"] == {"kind": "countable_product_of_Z"}


def test_run_config_file(tmp_path, capsys):
    cfg = {"command": "gamma-k", "p": 2, "k": 2, "R": 2, "n": [1, 2, 3, 4, 5, 6], "seed": 3}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, rep, _ = invoke(capsys, "run", str(path))
    assert code == 0
    assert rep["config"]["seed"] == 3
    assert rep["result"]["strictly_increasing"]


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["frobnicate"], 2),
        (["busemann-check", "--space", "torus"], 2),
        (["busemann-check", "--space", "lp:2:2", "--samples", "ten"], 2),
        (["net", "--space", "halfline", "--window", '{"start": 0, "stop": 5, "step": 1}', "--epsilon", "-1"], 3),
        (["spherical-dist", "--complex", '{"vertices": 3, "simplices": [[0, 1]]}', "--y1", "0", "--y2", "2"], 3),
        (["higson-certify", "--space", "halfline", "--function", "sin-radial", "--pull-back", "false"], 4),
        (["kinv", "--q", "0", "--bogus", "1"], 2),
        (["covering", "--space", "halfline", "--x", "5", "--R", "1", "--epsilon", "1"], 0),
        (["gamma-k", "--p", "2", "--k", "2", "--R", "2", "--n", "[1, 2, 3]"], 0),
    ],
)
def test_exit_code_matrix(capsys, argv, expected):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code == expected


def test_run_requires_one_path(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2


def test_missing_config_file(capsys):
    assert main(["run", "/nonexistent/config.json"]) == 2


def _strip(rep):
    rep = dict(rep)
    rep.pop("timing")
    return json.dumps(rep, sort_keys=True)


@pytest.mark.parametrize(
    "cfg",
    [
        {"command": "busemann-check", "space": "glued:2", "samples": 300, "seed": 7},
        {"command": "approx-map", "seed": 1},
        {"command": "anti-cech", "space": "halfline", "window": {"start": 0, "stop": 27, "step": 1},
         "base_radius": 1, "levels": 3},
        {"command": "higson-certify", "space": "lp:2:2", "function": "angular", "directions": 20, "seed": 2},
    ],
)
def test_reports_are_deterministic(cfg):
    assert _strip(run(cfg)) == _strip(run(cfg))


def test_every_command_is_documented():
    assert len(COMMANDS) == 17


def test_console_script_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "busecoarse.cli", "kinv", "--q", "1"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["kind"] == "countable_product_of_Z"
