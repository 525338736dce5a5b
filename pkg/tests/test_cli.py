from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from ewalk.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_velocity_json(capsys):
    code, out, _ = run(capsys, "velocity", "--kind", "W", "--coin", "hadamard", "--field", "1/3")
    doc = json.loads(out)
    assert code == 0
    assert doc["closed_form"] == pytest.approx(0.35355339059327, abs=1e-12)
    assert abs(doc["numeric"] - doc["closed_form"]) <= 1e-9
    assert doc["legacy_bound"] == pytest.approx(22.627417, abs=1e-6)


def test_revival_even_branch(capsys):
    code, out, _ = run(capsys, "revival", "--kind", "U", "--coin", "hadamard", "--field", "1/2")
    doc = json.loads(out)
    assert code == 0
    assert doc["closed_form"] == pytest.approx(math.sqrt(2), abs=1e-8)


def test_cf(capsys):
    code, out, _ = run(capsys, "cf", "21/106")
    doc = json.loads(out)
    assert code == 0
    assert doc["expansion"] == "[0;5,21]"
    assert doc["convergents"] == ["0/1", "1/5", "21/106"]


def test_cf_csv(capsys):
    code, out, _ = run(capsys, "cf", "3/7", "--format", "csv")
    assert out.splitlines() == ["k,quotient,convergent", "0,0,0/1", "1,2,1/2", "2,3,3/7"]


def test_field_autoreduced(capsys):
    code, out, _ = run(capsys, "velocity", "--field", "2/6")
    assert json.loads(out)["field"] == "1/3"


@pytest.mark.parametrize("argv", [
    ["velocity", "--field", "1/0"],
    ["velocity", "--field", "abc"],
    ["velocity", "--coin", "banana"],
    ["velocity", "--abs-a", "1.5"],
    ["dispersion", "--variant", "plain"],
    ["evolve", "--steps", "0"],
    ["nope"],
    ["velocity", "--kind", "X"],
])
def test_invalid_input_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("EWALK_THREADS", "-1")
    code, _, err = run(capsys, "velocity")
    assert code == 2
    assert "EWALK_THREADS" in err


def test_evolve_csv(capsys, tmp_path):
    target = tmp_path / "trace.csv"
    code, out, _ = run(capsys, "evolve", "--field", "1/5", "--field", "21/106", "--steps", "10",
                       "--output", str(target))
    assert code == 0 and out == ""
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "label,t,mean,sigma,revival_error"
    assert len(lines) == 1 + 4 * 11
    assert {ln.split(",")[0] for ln in lines[1:]} == {"U 1/5", "W 1/5", "U 21/106", "W 21/106"}


def test_evolve_variant(capsys):
    code, out, _ = run(capsys, "evolve", "--kind", "U", "--field", "1/3", "--variant", "tilde", "--steps", "3")
    assert code == 0
    rows = out.splitlines()[1:]
    assert len(rows) == 4
    assert all(r.split(",")[4] in ("", "0") for r in rows)


def test_deterministic_files(tmp_path):
    outs = []
    for k in range(2):
        target = tmp_path / f"s{k}.json"
        assert main(["sieve-check", "--field", "1/3", "--trials", "3", "-o", str(target)]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_dispersion_table(capsys):
    code, out, _ = run(capsys, "dispersion", "--kind", "U", "--field", "1/3", "--theta-samples", "8")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("theta,omega_plus,omega_minus,abs_group_velocity")
    assert len(lines) == 9
    for ln in lines[1:]:
        cols = [float(x) for x in ln.split(",")]
        assert cols[3] == pytest.approx(cols[4], abs=1e-9)
        assert cols[3] <= 3 * 2**-1.5 + 1e-12


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--kind", "W", "--field", "1/2", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["max_eigenvalue_distance"] <= 1e-10
    assert all(0 <= s <= e <= 1 for s, e in doc["arcs"])


def test_cmv_check(capsys):
    code, out, _ = run(capsys, "cmv-check", "--trials", "2", "--ring-size", "16")
    doc = json.loads(out)
    assert code == 0
    assert doc["coin_pair"]["alpha"][0] == pytest.approx(-1 / math.sqrt(2))


def test_defect_exit_3(capsys, monkeypatch):
    import ewalk.cli as cli

    monkeypatch.setattr(cli, "VELOCITY_TOL", -1.0)
    code, out, _ = run(capsys, "velocity", "--field", "1/3")
    assert code == 3
    assert json.loads(out)["gap"] >= 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ewalk", "cf", "1/5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["quotients"] == [0, 5]
