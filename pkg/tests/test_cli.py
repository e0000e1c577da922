import csv
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from herglotz_sl.cli import main

PROBLEMS = Path(__file__).resolve().parents[1] / "problems"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_spectrum_continuous(tmp_path, capsys):
    code, out, _ = run(capsys, "spectrum", PROBLEMS / "continuous.toml", "--out-dir", tmp_path)
    assert code == 0
    data = rows(tmp_path / "spectrum.csv")
    assert data[0] == ["lambda", "multiplicity", "classification", "residual"]
    assert len(data) == 6
    np.testing.assert_allclose([float(r[0]) for r in data[1:]], [0.25, 1, 2.25, 4, 6.25], atol=1e-8)
    assert all("." in r[0] for r in data[1:])


def test_spectrum_double_row(tmp_path, capsys):
    code, _, _ = run(capsys, "spectrum", PROBLEMS / "double_eigenvalue.toml", "--out-dir", tmp_path)
    assert code == 0
    text = (tmp_path / "spectrum.csv").read_text()
    assert "\n1.0,2,CaseI_PoleOfMu," in text


def test_beta_zero_is_validation_error(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text((PROBLEMS / "continuous.toml").read_text().replace('beta = "pi"', "beta = 0.0"))
    code, _, err = run(capsys, "spectrum", bad, "--out-dir", tmp_path)
    assert code == 2
    assert "beta ∈ (0,π]" in err


def test_missing_file_is_validation_error(tmp_path, capsys):
    code, _, err = run(capsys, "spectrum", tmp_path / "nope.toml")
    assert code == 2 and "error" in err


def test_flags_override_file(tmp_path, capsys):
    code, _, _ = run(capsys, "spectrum", PROBLEMS / "continuous.toml", "--out-dir", tmp_path,
                     "--window", "0.5", "3", "--grid", "20", "--tol", "1e-12", "--parallel", "2")
    assert code == 0
    lams = [float(r[0]) for r in rows(tmp_path / "spectrum.csv")[1:]]
    np.testing.assert_allclose(lams, [1.0, 2.25], atol=1e-8)


def test_bad_window_flag(tmp_path, capsys):
    code, _, _ = run(capsys, "spectrum", PROBLEMS / "continuous.toml", "--window", "3", "1")
    assert code == 2


def test_output_is_deterministic(tmp_path, capsys):
    for d in ("one", "two"):
        assert run(capsys, "spectrum", PROBLEMS / "full_herglotz.toml", "--out-dir", tmp_path / d)[0] == 0
    assert (tmp_path / "one" / "spectrum.csv").read_bytes() == (tmp_path / "two" / "spectrum.csv").read_bytes()


def test_environment_output_directory(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("HERGLOTZ_SL_OUT", str(tmp_path / "env"))
    assert run(capsys, "spectrum", PROBLEMS / "continuous.toml")[0] == 0
    assert (tmp_path / "env" / "spectrum.csv").exists()
    assert run(capsys, "spectrum", PROBLEMS / "continuous.toml", "--out-dir", tmp_path / "flag")[0] == 0
    assert (tmp_path / "flag" / "spectrum.csv").exists()


def test_greens_regular(tmp_path, capsys):
    code, _, _ = run(capsys, "greens", PROBLEMS / "continuous.toml", "--lambda", "0.5",
                     "--grid-n", "4", "--out-dir", tmp_path)
    assert code == 0
    data = rows(tmp_path / "greens.csv")
    assert data[0] == ["x", "t", "re_G", "im_G"] and len(data) == 1 + 64
    vals = {(float(r[0]), float(r[1])): float(r[2]) for r in data[1:]}
    assert all(abs(vals[(x, t)] - vals[(t, x)]) < 1e-10 for x, t in vals)


def test_greens_at_eigenvalue(tmp_path, capsys):
    code, _, err = run(capsys, "greens", PROBLEMS / "continuous.toml", "--lambda", "0.25", "--out-dir", tmp_path)
    assert code == 3 and "eigenvalue" in err


def test_greens_at_pole_uses_block_kernel(tmp_path, capsys):
    code, _, _ = run(capsys, "greens", PROBLEMS / "double_eigenvalue.toml", "--lambda", "0",
                     "--grid-n", "4", "--out-dir", tmp_path)
    assert code == 0
    for x, t, re, im in rows(tmp_path / "greens.csv")[1:]:
        if float(x) * float(t) < 0:
            assert float(re) == 0.0 and float(im) == 0.0


def test_greens_complex_lambda(tmp_path, capsys):
    code, _, _ = run(capsys, "greens", PROBLEMS / "full_herglotz.toml", "--lambda", "1+1j",
                     "--grid-n", "3", "--out-dir", tmp_path)
    assert code == 0
    assert any(float(r[3]) != 0 for r in rows(tmp_path / "greens.csv")[1:])


def test_bad_lambda(tmp_path, capsys):
    assert run(capsys, "greens", PROBLEMS / "continuous.toml", "--lambda", "one")[0] == 2


def _defect(out):
    line = next(l for l in out.splitlines() if "round-trip defect" in l)
    return float(line.rsplit(" ", 1)[1])


@pytest.mark.parametrize("lam", ["0.37", "0.5", "1+1j"])
def test_resolvent(tmp_path, capsys, lam):
    code, out, _ = run(capsys, "resolvent", PROBLEMS / "full_herglotz.toml", "--lambda", lam,
                       "--rhs", PROBLEMS / "rhs_cos.toml", "--out-dir", tmp_path)
    assert code == 0
    assert _defect(out) < 1e-6
    vec = rows(tmp_path / "vectors.csv")
    assert vec[0] == ["block", "index", "re", "im"] and len(vec) == 1 + 3 + 2
    assert rows(tmp_path / "resolvent.csv")[0] == ["x", "re_f", "im_f"]


def test_resolvent_zero_rhs(tmp_path, capsys):
    code, _, _ = run(capsys, "resolvent", PROBLEMS / "continuous.toml", "--lambda", "2",
                     "--rhs", PROBLEMS / "rhs_zero.toml", "--out-dir", tmp_path)
    assert code == 0
    assert all(float(r[1]) == 0 and float(r[2]) == 0 for r in rows(tmp_path / "resolvent.csv")[1:])


def test_resolvent_at_eigenvalue(tmp_path, capsys):
    rhs = tmp_path / "rhs.toml"
    rhs.write_text('[function]\nleft = "cos(x)"\nright = "cos(x)"\n')
    code, _, err = run(capsys, "resolvent", PROBLEMS / "continuous.toml", "--lambda", "0.25",
                       "--rhs", rhs, "--out-dir", tmp_path)
    assert code == 3 and "eigenvalue" in err


def test_fd(tmp_path, capsys):
    code, _, _ = run(capsys, "fd", PROBLEMS / "continuous.toml", "--count", "5", "--out-dir", tmp_path)
    assert code == 0
    data = rows(tmp_path / "fd_spectrum.csv")
    np.testing.assert_allclose([float(r[1]) for r in data[1:]], [0.25, 1, 2.25, 4, 6.25], atol=5e-3)


@pytest.mark.parametrize("name", ["continuous", "double_eigenvalue", "no_double_slice", "full_herglotz",
                                  "coincident_poles", "step_potential"])
def test_verify_shipped(capsys, name):
    code, out, _ = run(capsys, "verify", PROBLEMS / f"{name}.toml")
    assert code == 0, out
    assert "FAIL" not in out


def test_verify_corrupted_residue(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    text = (PROBLEMS / "full_herglotz.toml").read_text()
    bad.write_text(text.replace("residue_squares = [0.7, 1.3]", "residue_squares = [-0.7, 1.3]"))
    code, out, _ = run(capsys, "verify", bad)
    assert code == 1
    assert "FAIL" in out and "residue squares positive" in out


def test_verify_without_window_uses_defaults(tmp_path, capsys):
    src = (PROBLEMS / "continuous.toml").read_text()
    trimmed = tmp_path / "nowin.toml"
    trimmed.write_text(src.split("[scan]")[0])
    code, out, _ = run(capsys, "verify", trimmed)
    assert code == 0 and "all invariants hold" in out


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "herglotz_sl.cli", "spectrum",
                           str(PROBLEMS / "continuous.toml"), "--out-dir", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "spectrum.csv").exists()
