import json
import math
import subprocess
import sys

import numpy as np
import pytest

from areavar.cli import main
from areavar.grids import read_scalar_csv


def write_cfg(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def load(path):
    with open(path) as fh:
        return json.load(fh)


SOLVE_XY = {
    "domain": {"extents": [[-1, 1], [-1, 1]], "n_cells": [48, 48]},
    "spec": {"preset": "p_area"},
    "boundary": {"expression": "x*y"},
    "seed": 7,
}


def test_solve_xy(tmp_path):
    cfg = write_cfg(tmp_path, "solve.json", SOLVE_XY)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    rep = load(out / "report.json")
    assert rep["command"] == "solve"
    assert rep["seed"] == 7
    assert rep["converged"] is True
    h = 2.0 / 48
    assert abs(rep["singular_set_measure"] - 2.0 * h * 2.0) <= 1e-12
    assert abs(rep["energy"] - 4.0) <= 0.04
    assert rep["residual"] <= 1e-10
    assert rep["stages"]
    u = read_scalar_csv(out / "solution.csv")
    assert u.values.shape == (49, 49)
    xs = u.dom.axis_nodes(0)
    assert np.abs(u.values - xs[:, None] * u.dom.axis_nodes(1)[None, :]).max() <= 1e-6


def test_solve_seed_flag_overrides_config(tmp_path):
    cfg = write_cfg(tmp_path, "solve.json", SOLVE_XY)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out), "--seed", "99"]) == 0
    assert load(out / "report.json")["seed"] == 99


def test_solve_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", "--config", str(bad), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    diag = json.loads(err)
    assert diag["exit_code"] == 2 and "JSON" in diag["error"]


def test_solve_missing_key(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "solve.json", {"domain": SOLVE_XY["domain"]})
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "boundary" in json.loads(capsys.readouterr().err)["error"]


def test_solve_bad_expression(tmp_path, capsys):
    payload = dict(SOLVE_XY, boundary={"expression": "__import__('os')"})
    cfg = write_cfg(tmp_path, "solve.json", payload)
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_solve_nonconvergence_exit_code(tmp_path):
    payload = dict(
        SOLVE_XY,
        boundary={"expression": "sin(4*x)*cos(3*y)"},
        solver={"a_schedule": [0.01], "max_newton_iters": 1},
    )
    cfg = write_cfg(tmp_path, "solve.json", payload)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 3
    assert load(out / "report.json")["converged"] is False


def test_usage_errors():
    assert main(["frobnicate"]) == 2
    assert main(["solve"]) == 2  # --config is required
    assert main(["solve", "--config", "x.json", "--bogus-flag"]) == 2


def test_missing_config_file(tmp_path, capsys):
    assert main(["solve", "--config", str(tmp_path / "absent.json")]) == 2
    assert json.loads(capsys.readouterr().err)["exit_code"] == 2


def test_vary_plane_sandwich(tmp_path):
    payload = {
        "domain": {"extents": [[-1, 1], [-1, 1]], "n_cells": [32, 32]},
        "spec": {"preset": "p_area"},
        "boundary": {"expression": "2*x - y + 1"},
        "direction": {"random": True},
        "seed": 3,
    }
    cfg = write_cfg(tmp_path, "vary.json", payload)
    out = tmp_path / "out"
    assert main(["vary", "--config", cfg, "--out", str(out)]) == 0
    rep = load(out / "vary_report.json")
    tol = 1e-4 * (1.0 + rep["F_value"])
    assert rep["Fprime_minus"] <= tol
    assert rep["Fprime_plus"] >= -tol
    assert rep["Fsecond"] >= 0.0
    assert rep["second_variation_area"] >= 0.0
    assert rep["second_variation_lifted"] >= 0.0


def test_vary_explicit_direction(tmp_path):
    payload = {
        "domain": {"extents": [[-1, 1], [-1, 1]], "n_cells": [24, 24]},
        "spec": {"preset": "p_area"},
        "boundary": {"expression": "0.5*x"},
        "direction": {"expression": "(1 - x*x) * (1 - y*y)"},
    }
    cfg = write_cfg(tmp_path, "vary.json", payload)
    out = tmp_path / "out"
    assert main(["vary", "--config", cfg, "--out", str(out)]) == 0
    rep = load(out / "vary_report.json")
    assert rep["Fprime_minus"] <= rep["Fprime_plus"]


def test_area_intrinsic_constant_density(tmp_path):
    payload = {
        "domain": {"extents": [[-1, 1], [-1, 1]], "n_cells": [32, 32]},
        "kind": "intrinsic",
        "field": {"expression": "x"},
    }
    cfg = write_cfg(tmp_path, "area.json", payload)
    out = tmp_path / "out"
    assert main(["area", "--config", cfg, "--out", str(out)]) == 0
    rep = load(out / "report.json")
    assert abs(rep["min_density"] - math.sqrt(2.0)) <= 1e-12
    assert abs(rep["max_density"] - math.sqrt(2.0)) <= 1e-12
    lines = (out / "density.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 32 * 32


def test_area_heisenberg_xy(tmp_path):
    payload = {
        "domain": {"extents": [[-1, 1], [-1, 1]], "n_cells": [16, 16]},
        "kind": "heisenberg",
        "field": {"expression": "x*y"},
    }
    cfg = write_cfg(tmp_path, "area.json", payload)
    out = tmp_path / "out"
    assert main(["area", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "density.csv").read_text().strip().splitlines()[1:]
    for row in lines:
        _, _, x, _, v = row.split(",")
        assert abs(float(v) - 2.0 * abs(float(x))) <= 1e-12


def test_area_unknown_kind(tmp_path):
    payload = {
        "domain": {"extents": [[-1, 1], [-1, 1]], "n_cells": [8, 8]},
        "kind": "klein",
        "field": {"expression": "x"},
    }
    cfg = write_cfg(tmp_path, "area.json", payload)
    assert main(["area", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_curvature_sphere_cap(tmp_path):
    payload = {
        "domain": {"extents": [[-0.6, 0.6], [-0.6, 0.6]], "n_cells": [64, 64]},
        "operator": "euclidean",
        "field": {"expression": "sqrt(1 - x*x - y*y)"},
    }
    cfg = write_cfg(tmp_path, "curv.json", payload)
    out = tmp_path / "out"
    assert main(["curvature", "--config", cfg, "--out", str(out)]) == 0
    rep = load(out / "report.json")
    assert rep["valid_cells"] == 62 * 62
    assert abs(rep["min"] + 2.0) <= 0.04 and abs(rep["max"] + 2.0) <= 0.04


def test_curvature_horizontal_xy(tmp_path):
    payload = {
        "domain": {"extents": [[-1, 1], [-1, 1]], "n_cells": [32, 32]},
        "operator": "horizontal",
        "field": {"expression": "x*y"},
    }
    cfg = write_cfg(tmp_path, "curv.json", payload)
    out = tmp_path / "out"
    assert main(["curvature", "--config", cfg, "--out", str(out)]) == 0
    rep = load(out / "report.json")
    assert rep["masked_cells"] > 0
    assert rep["min"] == 0.0 and rep["max"] == 0.0


def test_decompose_orthogonal_pair(tmp_path):
    measure = lambda dens: {
        "d": 2,
        "cells": [{"id": 0, "weight": 1.0, "density": dens}],
        "atoms": [],
    }
    payload = {"mu": measure([1.0, 0.0]), "nu": measure([0.0, 1.0]), "eps": 0.0}
    cfg = write_cfg(tmp_path, "dec.json", payload)
    out = tmp_path / "out"
    assert main(["decompose", "--config", cfg, "--out", str(out)]) == 0
    rep = load(out / "decompose_report.json")
    assert rep["density_N"] == [[1.0, 0.0]]
    assert rep["density_A"] == [[0.0, 1.0]]
    assert rep["total_variation_mu"] == 1.0
    assert rep["line_energy"] == 1.0
    assert rep["Fprime_minus"] == 0.0 and rep["Fprime_plus"] == 0.0
    assert rep["Fsecond"] == 1.0
    assert rep["singular_epsilons"] == []
    assert rep["support"] == [True]


def test_decompose_from_path_and_errors(tmp_path, capsys):
    mu_path = tmp_path / "mu.json"
    mu_path.write_text(
        json.dumps({"d": 2, "cells": [{"id": 0, "weight": 1.0, "density": [3.0, 4.0]}]})
    )
    payload = {
        "mu": {"path": str(mu_path)},
        "nu": {"d": 2, "cells": [{"id": 0, "weight": 1.0, "density": [0.0, 0.0]}]},
    }
    cfg = write_cfg(tmp_path, "dec.json", payload)
    out = tmp_path / "out"
    assert main(["decompose", "--config", cfg, "--out", str(out)]) == 0
    assert load(out / "decompose_report.json")["total_variation_mu"] == 5.0

    bad = {"mu": {"d": 2, "cells": "nope"}, "nu": payload["nu"]}
    cfg2 = write_cfg(tmp_path, "dec2.json", bad)
    assert main(["decompose", "--config", cfg2, "--out", str(out)]) == 2
    assert "mu" in json.loads(capsys.readouterr().err)["error"]


def test_verify_fast_reproducible(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "verify.json", {"profile": "fast", "seed": 2026})
    out1, out2 = tmp_path / "v1", tmp_path / "v2"
    assert main(["verify", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["verify", "--config", cfg, "--out", str(out2)]) == 0
    b1 = (out1 / "verify_report.json").read_bytes()
    b2 = (out2 / "verify_report.json").read_bytes()
    assert b1 == b2
    rep = load(out1 / "verify_report.json")
    assert rep["all_passed"] is True
    assert rep["seed"] == 2026
    assert len(rep["criteria"]) == 12
    assert "PASS: 12/12" in capsys.readouterr().out


def test_verify_threshold_override_forces_failures(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        "verify.json",
        {"profile": "fast", "seed": 2026, "threshold_override": 0.0},
    )
    out = tmp_path / "v"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 1
    stdout = capsys.readouterr().out
    assert "FAIL" in stdout
    rep = load(out / "verify_report.json")
    assert rep["all_passed"] is False


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "areavar.cli", "nonsense"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
