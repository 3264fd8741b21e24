import csv
import subprocess
import sys

import pytest

from rdwlab import __version__
from rdwlab.cli import CSV_HEADER, main
from rdwlab.env import builtin_source


def _body(path):
    lines = path.read_text().splitlines(keepends=True)
    assert lines[0].startswith("# rdw-lab")
    return "".join(lines[1:])


def _rows(path):
    return list(csv.DictReader(line for line in _body(path).splitlines()))


@pytest.fixture
def env_file(tmp_path):
    f = tmp_path / "my.env"
    f.write_text(builtin_source(1))
    return f


def test_run_rows_and_summary(tmp_path):
    out = tmp_path / "res"
    assert main(["run", "--experiment", "2", "--controllers", "vis-poly,apf", "--trials", "2",
                 "--seed", "42", "--out", str(out)]) == 0
    rows = _rows(out / "results.csv")
    assert len(rows) == 4
    assert list(rows[0]) == CSV_HEADER
    assert {r["controller"] for r in rows} == {"vis-poly", "apf"}
    for r in rows:
        assert float(r["resets_per_meter"]) == pytest.approx(int(r["resets"]) / float(r["virt_distance_m"]))
    summary = (out / "summary.txt").read_text()
    assert "vis-poly" in summary and "median" in summary and "IQR" in summary


def test_env_pair_run_and_determinism(tmp_path, env_file):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["run", "--env-pair", str(env_file), "--controllers", "arc", "--trials", "2",
                     "--seed", "1", "--out", str(out)]) == 0
    assert len(_rows(a / "results.csv")) == 2
    assert _body(a / "results.csv") == _body(b / "results.csv")


def test_trace_svg(tmp_path):
    out = tmp_path / "t"
    assert main(["run", "--experiment", "1", "--controllers", "s2c", "--trials", "1",
                 "--out", str(out), "--trace-svg"]) == 0
    svg = (out / "traces" / "s2c_trial000.svg").read_text()
    assert svg.startswith("<svg")


def test_validate(capsys, env_file):
    assert main(["validate", "--env-pair", str(env_file)]) == 0
    text = capsys.readouterr().out
    assert "physical: boundary 4 vertices, 4 static obstacles" in text
    assert "virtual: boundary 4 vertices, 6 static obstacles" in text


def test_validate_invalid_env(capsys, tmp_path):
    f = tmp_path / "bad.env"
    f.write_text("physical:\n  boundary: [(0, 0), (1, 0)]\nvirtual:\n  boundary: [(0, 0), (1, 0), (0, 1)]\n")
    assert main(["validate", "--env-pair", str(f)]) == 1
    assert "ValidationError" in capsys.readouterr().err


def test_export_and_replay(tmp_path):
    paths = tmp_path / "paths"
    assert main(["export-paths", "--experiment", "1", "--trials", "2", "--seed", "7",
                 "--out", str(paths)]) == 0
    assert sorted(p.name for p in paths.iterdir()) == ["trial_000.path", "trial_001.path"]
    direct, replay = tmp_path / "direct", tmp_path / "replay"
    assert main(["run", "--experiment", "1", "--controllers", "none", "--trials", "2",
                 "--seed", "7", "--out", str(direct)]) == 0
    assert main(["run", "--experiment", "1", "--controllers", "none", "--seed", "7",
                 "--paths", str(paths), "--out", str(replay)]) == 0
    assert _body(direct / "results.csv") == _body(replay / "results.csv")


@pytest.mark.parametrize("argv", [
    [],
    ["run"],
    ["run", "--experiment", "5"],
    ["run", "--experiment", "1", "--env-pair", "x.env"],
    ["run", "--experiment", "1", "--controllers", "vis-poly,warp"],
    ["run", "--experiment", "1", "--trials", "0"],
    ["run", "--experiment", "1", "--trials", "many"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "usage" in capsys.readouterr().err


def test_runtime_errors_exit_1(tmp_path, capsys):
    assert main(["validate", "--env-pair", str(tmp_path / "missing.env")]) == 1
    assert main(["run", "--experiment", "1", "--paths", str(tmp_path), "--out", str(tmp_path)]) == 1
    assert "rdw-lab: error" in capsys.readouterr().err


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_console_module():
    r = subprocess.run([sys.executable, "-m", "rdwlab", "validate", "--experiment", "4"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert r.stdout.rstrip().endswith("4: ok")
