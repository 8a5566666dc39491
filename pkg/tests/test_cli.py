import json
import math
import os

import numpy as np
import pytest

from gamma_ec import cli


def run_cli(tmp_path, command, job, name="job", **flags):
    job_path = tmp_path / f"{name}.json"
    out_path = tmp_path / f"{name}.out"
    job_path.write_text(json.dumps(job))
    argv = [command, "--input", str(job_path), "--output", str(out_path)]
    for key, value in flags.items():
        argv += [f"--{key.replace('_', '-')}", str(value)]
    code = cli.main(argv)
    return code, out_path


def test_solve1d_roundtrip(tmp_path):
    code, out = run_cli(tmp_path, "solve1d", {"function": "z", "ball_radius": 40.0, "epsilon": 1.0}, seed=7)
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["schema"] == 1
    assert payload["count"] == len(payload["zeros"]) >= 2
    for z in payload["zeros"]:
        assert z["winding"] >= 1
        assert z["residual"] < 1e-9


def test_determinism_byte_identical(tmp_path):
    job = {"function": "z", "ball_radius": 40.0, "epsilon": 1.0}
    _, out1 = run_cli(tmp_path, "solve1d", job, name="a", seed=3)
    _, out2 = run_cli(tmp_path, "solve1d", job, name="b", seed=3)
    assert out1.read_bytes() == out2.read_bytes()


def test_unknown_field_rejected(tmp_path):
    code, _ = run_cli(tmp_path, "solve1d", {"function": "z", "ball_radius": 4.0, "bogus": 1})
    assert code == 2


def test_missing_input_rejected(tmp_path):
    out = tmp_path / "o.json"
    code = cli.main(["solve1d", "--input", str(tmp_path / "missing.json"), "--output", str(out)])
    assert code == 2


def test_bad_tolerance_rejected(tmp_path):
    code, _ = run_cli(tmp_path, "solve1d", {"function": "z", "ball_radius": 4.0}, tol_root="0.5")
    assert code == 2


def test_solver_failure_writes_diagnostic(tmp_path):
    job = {"theta": 5.0, "seed": [8.0, 4.0], "x_end": 12.0}
    code, out = run_cli(tmp_path, "trace-argument", job, format="json")
    assert code == 3
    payload = json.loads(out.read_text())
    assert payload["error"]["type"] == "DomainError"


def test_trace_modulus_csv(tmp_path):
    code, out = run_cli(tmp_path, "trace-modulus", {"r": 24.0, "x_end": 12.0})
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# kind=constant_modulus")
    assert lines[1] == "re,im,log_abs_gamma,arg_unwrapped"
    data = np.array([[float(v) for v in line.split(",")] for line in lines[2:]])
    assert np.all(np.diff(data[:, 0]) > 0)
    assert np.all(np.diff(data[:, 1]) > 0)


def test_trace_argument_real_axis(tmp_path):
    job = {"theta": 0.0, "seed": [3.0, 0.0], "x_end": 9.0}
    code, out = run_cli(tmp_path, "trace-argument", job)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# kind=constant_argument")


def test_count_zeros(tmp_path):
    job = {"function": "z", "radii": [20.0, 30.0, 40.0], "epsilon": 1.0}
    code, out = run_cli(tmp_path, "count-zeros", job, seed=1)
    assert code == 0
    payload = json.loads(out.read_text())
    counts = payload["counts"]
    assert len(counts) == 3
    assert payload["offset_c"] > 0
    assert isinstance(payload["zeros"], list)


def test_solve_exp_csv_format(tmp_path):
    job = {"function": "z", "count": 2}
    code, out = run_cli(tmp_path, "solve-exp", job, format="csv")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "root_re,root_im,residual,winding"
    assert len(lines) == 3


def test_periodic_points_command(tmp_path):
    code, out = run_cli(tmp_path, "periodic-points", {"period": 1, "count": 1})
    assert code == 0
    payload = json.loads(out.read_text())
    z = complex(*payload["points"][0])
    assert abs(z - 3.5624) < 1e-3
    assert payload["composed_residuals"][0] < 1e-10


def test_verify_identities_threaded(tmp_path):
    job = {"points": 60, "max_modulus": 30.0, "orders": [2, 3]}
    code, out = run_cli(tmp_path, "verify-identities", job, threads=2, seed=5)
    assert code == 0
    payload = json.loads(out.read_text())
    worst = payload["max_residuals"]
    for key in ("recurrence", "reflection", "multiplication_2", "multiplication_3"):
        assert worst[key] < 1e-11
    assert worst["algebraic"] < 1e-12


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("GAMMA_EC_THREADS", "2")
    job = {"points": 10, "max_modulus": 20.0}
    code, out = run_cli(tmp_path, "verify-identities", job)
    assert code == 0


def test_solvend_command(tmp_path):
    job = {
        "n": 2,
        "functions": ["z1+z2", "z1*z2"],
        "epsilon": 0.25,
        "targets": {"count": 1, "max_modulus": 10000.0},
    }
    code, out = run_cli(tmp_path, "solvend", job, seed=11)
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["count"] == 1
    sol = payload["solutions"][0]
    assert sol["certification_level"] == "sampled"
    assert sol["rouche_margin"] > 0
    assert max(sol["residuals"]) < 1e-8


def test_solvend_with_declared_limits(tmp_path):
    job = {
        "n": 1,
        "functions": ["exp(1/z1)"],
        "limits": [1.0],
        "targets": {"count": 1},
    }
    code, out = run_cli(tmp_path, "solvend", job, seed=2)
    assert code == 0
    payload = json.loads(out.read_text())
    sol = payload["solutions"][0]
    z = complex(sol["point"][0][0], sol["point"][0][1])
    import cmath

    from gamma_ec import gamma_core as gc

    assert abs(gc.gamma(z).value - cmath.exp(1 / z)) < 1e-8
