import io
import json
import math
import os
import struct
import subprocess
import sys

import numpy as np
import pytest

from flowbch.algebra import QCA, AlgebraElement
from flowbch.bch import bch
from flowbch.cli import EXIT_DOMAIN, EXIT_IO, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, format_number, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


class TestBch:
    def test_heisenberg(self):
        assert run("bch", "--algebra", "heisenberg", "--a", "1,2,0", "--b", "3,-1,0") == (EXIT_OK, "4,1,-3.5\n")

    def test_identity_factor(self):
        assert run("bch", "--algebra", "heisenberg", "--a", "1,0,0", "--b", "0,0,0") == (EXIT_OK, "1,0,0\n")

    def test_qca_s_then_constant(self):
        code, text = run("bch", "--algebra", "qca", "--a", "0,0,0,1,0", "--b", "0,0,0,0,1")
        values = [float(v) for v in text.strip().split(",")]
        assert code == EXIT_OK
        assert values[3] == 1 and values[4] == pytest.approx(1 / (math.e - 1), abs=1e-12)

    def test_json_round_trip_is_bit_exact(self):
        code, text = run("bch", "--algebra", "qca", "--a", "0.1,0.2,0.3,0.4,0.5", "--b=-0.2,0.1,0.05,0.3,-0.7", "--format", "json")
        payload = json.loads(text)
        Z = bch(AlgebraElement(QCA, [0.1, 0.2, 0.3, 0.4, 0.5]), AlgebraElement(QCA, [-0.2, 0.1, 0.05, 0.3, -0.7]))
        pack = lambda xs: struct.pack(f"{len(xs)}d", *xs)
        assert code == EXIT_OK and payload["algebra"] == "qca"
        assert pack(payload["coeffs"]) == pack(Z.coeffs.tolist())

    def test_csv(self):
        code, text = run("bch", "--algebra", "qsa", "--a", "0,0,1", "--b", "1,0,0", "--format", "csv")
        header, row = text.strip().split("\n")
        assert header == "q2,p2,qp" and row.split(",")[2] == "1"

    @pytest.mark.parametrize("alg, a, b", [
        ("cha", "0.3,-0.2,0.5,1", "0.1,0.4,-0.3,0.2"),
        ("qca", "0.2,0.1,-0.3,0.4,0.5", "0.1,0.3,0.2,-0.2,0.1"),
        ("su2c", "0.3:0.1,0.2,-0.4", "0.1,0.5:-0.2,0.3"),
    ])
    def test_check_oracle(self, alg, a, b):
        code, text = run("bch", "--algebra", alg, "--a", a, "--b", b, "--check-oracle")
        assert code == EXIT_OK and "(ok)" in text

    def test_check_oracle_mismatch_exit(self):
        code, text = run("bch", "--algebra", "cha", "--a", "0.3,-0.2,0.5,1", "--b", "0.1,0.4,-0.3,0.2", "--check-oracle", "--tolerance", "1e-30")
        assert code == EXIT_MISMATCH and "MISMATCH" in text

    def test_branch_error_exit(self, capsys):
        r = "0.7853981633974483"
        code, _ = run("bch", "--algebra", "qsa", "--a", f"{r},{r},0", "--b", f"{r},{r},0")
        assert code == EXIT_DOMAIN
        assert "not in exponential image" in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [
        ["bch", "--algebra", "heisenberg", "--a", "1,2", "--b", "3,-1,0"],
        ["bch", "--algebra", "heisenberg", "--a", "x,2,0", "--b", "3,-1,0"],
        ["bch", "--algebra", "nope", "--a", "1", "--b", "1"],
        ["bch", "--algebra", "heisenberg", "--a", "1,2,0"],
        ["frobnicate"],
    ])
    def test_usage_errors(self, argv, capsys):
        assert run(*argv)[0] == EXIT_USAGE


class TestFlow:
    def test_pure_s_hamiltonian(self):
        code, text = run("flow", "--algebra", "cha", "--h", "0,0,1,0", "--x0", "1,2,3", "--t", "1")
        values = [float(v) for v in text.strip().split(",")]
        assert code == EXIT_OK and np.allclose(values, [1, 2 / math.e, 3 / math.e], atol=1e-15)

    def test_constant_hamiltonian(self):
        # the last CHA coordinate is the constant 1, which translates s
        assert run("flow", "--algebra", "cha", "--h", "0,0,0,1", "--x0", "1,2,3", "--t", "1") == (EXIT_OK, "1,2,2\n")

    def test_zero_time_echoes(self):
        assert run("flow", "--algebra", "qca", "--h", "1,2,3,4,5", "--x0", "0.5,-1,2", "--t", "0") == (EXIT_OK, "0.5,-1,2\n")

    def test_rk4_matches_exact(self):
        base = ["flow", "--algebra", "qca", "--h", "0.5,0.5,0,0.3,0", "--x0", "1,0,0", "--t", "1"]
        _, exact = run(*base)
        _, approx = run(*base, "--method", "rk4", "--steps", "500")
        assert np.allclose([float(v) for v in exact.split(",")], [float(v) for v in approx.split(",")], atol=1e-12)

    def test_qsa_and_su2c_states(self):
        assert run("flow", "--algebra", "qsa", "--h", "0,0,1", "--x0", "1,1", "--t", "0")[1] == "1,1\n"
        code, text = run("flow", "--algebra", "su2c", "--h", "0,0,0", "--x0", "1:2,0", "--t", "1")
        assert code == EXIT_OK and text == "1:2,0:0\n"

    def test_wrong_state_length(self):
        assert run("flow", "--algebra", "cha", "--h", "0,0,1,0", "--x0", "1,2", "--t", "1")[0] == EXIT_USAGE

    def test_divergence_exit(self):
        code, _ = run("flow", "--algebra", "qca", "--h=-50,50,0,0,0", "--x0", "1,1,0", "--t", "100", "--method", "rk4", "--steps", "100")
        assert code == EXIT_DOMAIN


class TestVerify:
    def test_smoke(self):
        code, text = run("verify", "--suite", "brackets", "--trials", "10", "--seed", "1")
        assert code == EXIT_OK and text.rstrip().endswith("overall: PASS")

    def test_deterministic(self):
        argv = ["verify", "--suite", "representations", "--trials", "20", "--seed", "7", "--format", "json"]
        assert run(*argv)[1] == run(*argv)[1]

    def test_seed_changes_samples(self):
        a = run("verify", "--suite", "brackets", "--trials", "10", "--seed", "1")[1]
        b = run("verify", "--suite", "brackets", "--trials", "10", "--seed", "2")[1]
        assert a != b

    def test_failure_exit(self):
        code, text = run("verify", "--suite", "bch", "--trials", "5", "--tolerance", "1e-30")
        assert code == EXIT_MISMATCH and text.rstrip().endswith("overall: FAIL")
        assert run("verify", "--tolerance", "0")[0] == EXIT_USAGE

    def test_csv_format(self):
        text = run("verify", "--suite", "brackets", "--trials", "3", "--format", "csv")[1]
        assert text.splitlines()[0].startswith("suite,")


class TestSweep:
    def test_stdout_rows(self, capsys):
        code, text = run("sweep", "--gammas", "2", "--n-points", "4", "--perms", "TVC,TCV", "--out", "-")
        lines = text.strip().split("\n")
        assert code == EXIT_OK and lines[0].startswith("perm,gamma,tau") and len(lines) == 1 + 8
        assert "gamma=2: minimal distance" in capsys.readouterr().err

    def test_default_row_count(self, tmp_path):
        path = tmp_path / "sweep.csv"
        code, summary = run("sweep", "--out", str(path))
        assert code == EXIT_OK
        assert len(path.read_text().strip().split("\n")) == 3601
        assert "gamma=4: minimal distance TCV" in summary

    def test_unwritable(self, tmp_path):
        target = tmp_path / "missing" / "out.csv"
        assert run("sweep", "--n-points", "2", "--out", str(target))[0] == EXIT_IO

    def test_bad_perm(self):
        assert run("sweep", "--perms", "XYZ", "--out", "-")[0] == EXIT_USAGE


def test_format_number():
    assert format_number(3.0) == "3"
    assert format_number(-0.0) == "0"
    assert format_number(0.1) == "0.1"
    assert format_number(complex(1, -2)) == "1:-2"


def test_module_entry_point():
    env = dict(os.environ)
    result = subprocess.run(
        [sys.executable, "-m", "flowbch", "bch", "--algebra", "heisenberg", "--a", "1,0,0", "--b", "0,0,0"],
        capture_output=True, text=True, env=env,
    )
    assert result.returncode == 0 and result.stdout == "1,0,0\n"
