"""The ``wsigma`` command line."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from wsigma.cli import run


@pytest.fixture
def elliptic(tmp_path):
    p = tmp_path / "elliptic.toml"
    p.write_text("[curve]\nr = 2\ns = 3\ncoefficients = [[2, 1, 1]]\n")
    return p


@pytest.fixture
def genus2(tmp_path):
    p = tmp_path / "g2.json"
    p.write_text(json.dumps({"curve": {"r": 2, "s": 5, "coefficients": [[2, 0, -1]]}}))
    return p


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_semigroup(capsys):
    code, out, _ = call(capsys, "semigroup", "5,7,11")
    data = json.loads(out)
    assert code == 0
    assert data["young_rows"] == [6, 3, 3, 2, 1, 1, 1, 1]
    assert data["frobenius"] == [[0, 2, 7], [0, 1, 5]]


def test_invalid_generators_exit_one(capsys):
    code, out, err = call(capsys, "semigroup", "4,6")
    assert code == 1
    assert json.loads(out)["error"] == "NonCoprimeGenerators"
    assert "NonCoprimeGenerators" in err
    assert call(capsys, "semigroup", "a,b")[0] == 1


def test_usage_errors_exit_one(capsys, elliptic):
    assert call(capsys, "frobnicate")[0] == 1
    assert call(capsys, "verify", elliptic, "--suite", "nope")[0] == 1
    assert call(capsys, "periods", elliptic, "--tol", "-1")[0] == 1
    assert call(capsys, "curve", "/nonexistent.toml")[0] == 1


def test_curve_and_differentials(capsys, genus2):
    code, out, _ = call(capsys, "curve", genus2)
    data = json.loads(out)
    assert code == 0 and data["smooth"] and data["cyclic"]
    assert data["branch_data"]["riemann_hurwitz"][0] == data["branch_data"]["riemann_hurwitz"][1]
    code, out, _ = call(capsys, "differentials", genus2)
    assert code == 0 and json.loads(out)["duality_exact"]


def test_periods_deterministic(capsys, genus2, tmp_path):
    cache = tmp_path / "cache"
    a = call(capsys, "periods", genus2, "--cache-dir", cache)[1]
    b = call(capsys, "periods", genus2, "--cache-dir", cache)[1]
    c = call(capsys, "periods", genus2, "--no-cache")[1]
    assert a == b
    assert json.loads(a)["periods"] == json.loads(c)["periods"]
    assert float(json.loads(a)["periods"]["legendre_residual"]) < 1e-8


def test_sigma_values_and_out_file(capsys, elliptic, tmp_path):
    out = tmp_path / "s.json"
    code, stdout, _ = call(capsys, "sigma", elliptic, "--no-cache", "--at", "0.1+0.2i", "--at", "0.3", "--out", out)
    assert code == 0 and stdout == ""
    data = json.loads(out.read_text())
    assert len(data["values"]) == 2
    s = complex(float(data["values"][1]["sigma"]["re"]), float(data["values"][1]["sigma"]["im"]))
    assert abs(s - 0.3) < 1e-3  # sigma(u) = u + O(u^5)
    assert call(capsys, "sigma", elliptic, "--no-cache", "--at", "0.1", "0.2")[0] == 1


def test_verify_passes_and_fails(capsys, genus2):
    code, out, _ = call(capsys, "verify", genus2, "--no-cache", "--suite", "legendre,parity,translation", "--threads", "3")
    data = json.loads(out)
    assert code == 0 and data["pass"] and [c["check"] for c in data["checks"]] == ["legendre", "parity", "translation"]
    code, out, _ = call(capsys, "verify", genus2, "--no-cache", "--suite", "parity", "--tol", "1e-300")
    assert code == 2 and not json.loads(out)["pass"]


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "wsigma.cli", "semigroup", "2,3"], capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 0 and json.loads(proc.stdout)["genus"] == 1
