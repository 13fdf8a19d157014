import json
import subprocess
import sys

import numpy as np
import pytest

from pinchlab.cli import main
from pinchlab.mesh import read_s4off


def test_gen_then_analyze(tmp_path, capsys):
    mesh = tmp_path / "t.s4off"
    assert main(["gen", "--family", "clifford", "--res", "12", "12", "--out", str(mesh)]) == 0
    assert read_s4off(mesh).genus() == 1
    out = tmp_path / "r.json"
    assert main(["analyze", "--mesh", str(mesh), "--out", str(out), "--dump-matrices", str(tmp_path / "m")]) == 0
    rep = json.loads(out.read_text())
    assert rep["genus"] == 1 and len(rep["lemma_entries"]) == 12
    assert (tmp_path / "m.stiffness.coo").exists() and (tmp_path / "m.mass.coo").exists()


def test_analyze_to_stdout(capsys):
    assert main(["analyze", "--family", "sphere", "--refine", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["lambda1"] > 3.5 and rep["curvature_source"] == "analytic"


def test_sweep_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--family", "perturbed", "--delta", "0.1", "0.05", "0.02", "--refine", "2", "--out", str(out)]) == 0
    assert out.read_text().startswith("delta,eps,lambda1")


@pytest.mark.parametrize("argv, code, kind", [
    (["analyze", "--q", "2"], 2, "config"),
    (["gen", "--family", "sphere", "--radius", "2.0", "--out", "x.s4off"], 2, "config"),
    (["analyze", "--mesh", "/nonexistent/m.s4off"], 4, "io"),
    (["verify", "--only", "no_such_check"], 2, "config"),
])
def test_error_codes(argv, code, kind, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == code
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith(f"error[{kind}]:")


def test_corrupted_mesh_writes_no_report(tmp_path, capsys):
    bad = tmp_path / "bad.s4off"
    bad.write_text("S4OFF\n3 1\n1 0 0 0\n0 1 0 0\n0 0 1 0\n3 0 1 2\n")
    out = tmp_path / "r.json"
    assert main(["analyze", "--mesh", str(bad), "--out", str(out)]) == 4
    assert not out.exists()
    assert "boundary" in capsys.readouterr().err


def test_verify_reports_a_corrupted_mesh_by_name(tmp_path, capsys):
    bad = tmp_path / "bad.s4off"
    bad.write_text("S4OFF\n1 0\n2 0 0 0\n")
    assert main(["verify", "--only", "norm_monotonicity", "--mesh", str(bad)]) == 3
    out = capsys.readouterr().out
    assert "FAIL  mesh_file[" in out and "PASS  norm_monotonicity" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pinchlab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
