"""Command-line interface: solve, vary, verify, area, curvature, decompose.

Configs are JSON files; field output is CSV, report output is JSON with
17-significant-digit floats so identical runs produce identical bytes.
Exit codes: 0 success, 1 verification failure, 2 usage or schema error,
3 solver non-convergence.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import acceptance, measures
from .geometry import graph_area_density, mean_curvature_euclidean, p_mean_curvature
from .grids import (
    CellScalarField,
    EnergySpec,
    GridDomain,
    ScalarField,
    VectorField,
    gradient,
    read_scalar_csv,
    singular_set,
    write_cell_csv,
    write_scalar_csv,
)
from .solver import SolverConfig, continuation_minimize
from .util import to_json
from .variation import DirectionField, minimizer_first_variation, second_variation_graph


class CliError(Exception):
    """A failure with a deterministic exit code and a diagnostic payload."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


# ---- config parsing ----------------------------------------------------------

_EXPR_NAMES = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "hypot": np.hypot,
    "tanh": np.tanh,
    "atan2": np.arctan2,
    "minimum": np.minimum,
    "maximum": np.maximum,
    "where": np.where,
    "pi": np.pi,
    "e": np.e,
}


def _eval_expr(expr: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if not isinstance(expr, str):
        raise CliError(2, f"expression must be a string, got {type(expr).__name__}")
    ns = dict(_EXPR_NAMES)
    ns["x"] = x
    ns["y"] = y
    try:
        code = compile(expr, "<expression>", "eval")
        for name in code.co_names:
            if name not in ns:
                raise CliError(2, f"unknown name {name!r} in expression {expr!r}")
        out = eval(code, {"__builtins__": {}}, ns)
    except CliError:
        raise
    except Exception as exc:
        raise CliError(2, f"failed to evaluate expression {expr!r}: {exc}") from exc
    return np.broadcast_to(np.asarray(out, dtype=np.float64), x.shape).copy()


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CliError(2, f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(2, f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CliError(2, "config root must be a JSON object")
    return cfg


def _require(cfg: dict, key: str, where: str = "config"):
    if key not in cfg:
        raise CliError(2, f"{where} is missing required key {key!r}")
    return cfg[key]


def _domain_from(cfg: dict) -> GridDomain:
    dcfg = _require(cfg, "domain")
    try:
        extents = tuple((float(a), float(b)) for a, b in _require(dcfg, "extents", "domain"))
        n_cells = tuple(int(n) for n in _require(dcfg, "n_cells", "domain"))
        return GridDomain(extents, n_cells)
    except CliError:
        raise
    except (TypeError, ValueError) as exc:
        raise CliError(2, f"bad domain: {exc}") from exc


def _spec_from(cfg: dict, dom: GridDomain) -> EnergySpec:
    scfg = cfg.get("spec", {"preset": "zero"})
    preset = scfg.get("preset", "zero")
    H = scfg.get("H", 0.0)
    try:
        if isinstance(H, str):
            Xc, Yc = dom.center_coords()
            H = _eval_expr(H, Xc, Yc)
        else:
            H = float(H)
        if preset == "custom":
            fexpr = _require(scfg, "F", "spec")
            if not isinstance(fexpr, list) or len(fexpr) != 2:
                raise CliError(2, "spec.F must be a list of two expressions")
            Xc, Yc = dom.center_coords()
            F = np.stack([_eval_expr(fexpr[0], Xc, Yc), _eval_expr(fexpr[1], Xc, Yc)], axis=-1)
            return EnergySpec(preset="custom", F_field=VectorField(dom, F), H=H)
        return EnergySpec(preset=preset, H=H)
    except CliError:
        raise
    except (TypeError, ValueError) as exc:
        raise CliError(2, f"bad spec: {exc}") from exc


def _scalar_field(fcfg: dict, dom: GridDomain, what: str) -> ScalarField:
    if not isinstance(fcfg, dict):
        raise CliError(2, f"{what} must be an object with 'expression' or 'csv'")
    if "expression" in fcfg:
        xs = dom.axis_nodes(0)
        ys = dom.axis_nodes(1)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return ScalarField(dom, _eval_expr(fcfg["expression"], X, Y))
    if "csv" in fcfg:
        try:
            f = read_scalar_csv(fcfg["csv"])
        except OSError as exc:
            raise CliError(2, f"cannot read {what} CSV: {exc}") from exc
        except ValueError as exc:
            raise CliError(2, f"bad {what} CSV: {exc}") from exc
        if f.dom != dom:
            raise CliError(2, f"{what} CSV grid does not match the configured domain")
        return f
    raise CliError(2, f"{what} needs either 'expression' or 'csv'")


def _solver_config(cfg: dict) -> SolverConfig:
    scfg = cfg.get("solver", {})
    try:
        return SolverConfig.from_dict(scfg)
    except (TypeError, ValueError) as exc:
        raise CliError(2, f"bad solver config: {exc}") from exc


def _write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        fh.write(to_json(obj))
        fh.write("\n")


def _out_dir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def _solve_from_config(cfg: dict, seed: int):
    dom = _domain_from(cfg)
    spec = _spec_from(cfg, dom)
    phi = _scalar_field(_require(cfg, "boundary"), dom, "boundary")
    scfg = _solver_config(cfg)
    res = continuation_minimize(dom, spec, phi, scfg)
    return dom, spec, phi, res


# ---- subcommands ---------------------------------------------------------------


def cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    out = _out_dir(args)
    dom, spec, phi, res = _solve_from_config(cfg, seed)
    write_scalar_csv(res.u, os.path.join(out, "solution.csv"))
    sing = singular_set(res.u, spec)
    report = {
        "command": "solve",
        "seed": seed,
        "converged": res.converged,
        "energy": res.energy,
        "energy_regularized": res.energy_regularized,
        "residual": res.residual_norm,
        "a_final": res.a_final,
        "iterations": res.iterations,
        "stages": [
            {"a": a, "iterations": it, "stage_diff": diff} for a, it, diff in res.stages
        ],
        "singular_set_measure": sing.measure,
        "singular_cells": int(sing.mask.sum()),
    }
    _write_json(os.path.join(out, "report.json"), report)
    if not res.converged:
        raise CliError(3, "solver did not converge; see report.json")
    return 0


def cmd_vary(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    out = _out_dir(args)
    dom, spec, phi, res = _solve_from_config(cfg, seed)
    dcfg = cfg.get("direction", {"random": True})
    if dcfg.get("random", False):
        rng = np.random.RandomState(seed)
        direction = acceptance._rand_direction(dom, rng)
    elif "expression" in dcfg:
        raw = _scalar_field(dcfg, dom, "direction")
        vals = raw.values.copy()
        vals[dom.boundary_mask()] = 0.0
        direction = DirectionField(ScalarField(dom, vals))
    else:
        raise CliError(2, "direction needs 'expression' or 'random': true")
    rep = minimizer_first_variation(res.u, spec, direction)
    report = {
        "command": "vary",
        "seed": seed,
        "converged": res.converged,
        "F_value": rep.F_value,
        "Fprime_minus": rep.Fprime_minus,
        "Fprime_plus": rep.Fprime_plus,
        "Fsecond": rep.Fsecond,
        "epsilon": rep.epsilon,
        "is_regular": rep.is_regular,
        "second_variation_area": second_variation_graph(res.u, spec, direction, "area"),
        "second_variation_lifted": second_variation_graph(res.u, spec, direction, "riemannian"),
    }
    _write_json(os.path.join(out, "vary_report.json"), report)
    if not res.converged:
        raise CliError(3, "solver did not converge; see vary_report.json")
    return 0


def cmd_verify(args) -> int:
    cfg = _load_config(args.config) if args.config else {}
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 2026))
    profile = cfg.get("profile", "full")
    override = cfg.get("threshold_override", None)
    if override is not None:
        override = float(override)
    out = _out_dir(args)
    try:
        report = acceptance.run_all(seed=seed, profile=profile, threshold_override=override)
    except ValueError as exc:
        raise CliError(2, str(exc)) from exc
    _write_json(os.path.join(out, "verify_report.json"), report)
    failures = [
        f"{c['id']}: {row['check']} ({row['value']:.6g} > {row['threshold']:.6g})"
        for c in report["criteria"]
        for row in c["checks"]
        if not row["ok"]
    ]
    for line in failures:
        print(f"FAIL {line}")
    print(f"{'PASS' if report['all_passed'] else 'FAIL'}: "
          f"{sum(c['passed'] for c in report['criteria'])}/{len(report['criteria'])} criteria")
    return 0 if report["all_passed"] else 1


def _density_field(cfg: dict, dom: GridDomain) -> CellScalarField:
    kind = _require(cfg, "kind")
    if kind not in ("euclidean", "heisenberg", "intrinsic"):
        raise CliError(2, f"unknown density kind {kind!r}")
    u = _scalar_field(_require(cfg, "field"), dom, "field")
    g = gradient(u).values
    Xc, Yc = dom.center_coords()
    ncx, ncy = dom.n_cells
    vals = np.empty((ncx, ncy))
    if kind == "intrinsic":
        phi_c = u.cell_average()
        for i in range(ncx):
            for j in range(ncy):
                vals[i, j] = graph_area_density(
                    "intrinsic", None, (phi_c[i, j], g[i, j, 0], g[i, j, 1])
                )
    else:
        for i in range(ncx):
            for j in range(ncy):
                vals[i, j] = graph_area_density(kind, (Xc[i, j], Yc[i, j]), g[i, j])
    return CellScalarField(dom, vals, np.ones((ncx, ncy), dtype=bool))


def cmd_area(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    out = _out_dir(args)
    dom = _domain_from(cfg)
    dens = _density_field(cfg, dom)
    write_cell_csv(dens, os.path.join(out, "density.csv"))
    report = {
        "command": "area",
        "seed": seed,
        "kind": cfg["kind"],
        "min_density": float(dens.values.min()),
        "max_density": float(dens.values.max()),
        "cells": int(dens.values.size),
    }
    _write_json(os.path.join(out, "report.json"), report)
    return 0


def cmd_curvature(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    out = _out_dir(args)
    dom = _domain_from(cfg)
    op = cfg.get("operator", "euclidean")
    u = _scalar_field(_require(cfg, "field"), dom, "field")
    if op == "euclidean":
        field = mean_curvature_euclidean(u)
    elif op == "horizontal":
        field = p_mean_curvature(u, _spec_from(cfg, dom) if "spec" in cfg else None)
    else:
        raise CliError(2, f"unknown curvature operator {op!r}")
    write_cell_csv(field, os.path.join(out, "curvature.csv"))
    valid = field.values[field.mask]
    report = {
        "command": "curvature",
        "seed": seed,
        "operator": op,
        "valid_cells": int(field.mask.sum()),
        "masked_cells": int((~field.mask).sum()),
        "min": float(valid.min()) if valid.size else None,
        "max": float(valid.max()) if valid.size else None,
    }
    _write_json(os.path.join(out, "report.json"), report)
    return 0


def _measure_from(cfg, what: str) -> measures.VectorMeasure:
    data = cfg
    if isinstance(data, dict) and "path" in data:
        data = _load_config(data["path"])
    try:
        return measures.VectorMeasure.from_json_dict(data)
    except (TypeError, ValueError, KeyError) as exc:
        raise CliError(2, f"bad {what} measure: {exc}") from exc


def cmd_decompose(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    out = _out_dir(args)
    mu = _measure_from(_require(cfg, "mu"), "mu")
    nu = _measure_from(_require(cfg, "nu"), "nu")
    eps = float(cfg.get("eps", 0.0))
    try:
        dec = measures.decompose(nu, measures.add_scaled(mu, nu, eps) if eps else mu)
        fm, fp = measures.first_variation_pm(mu, nu, eps)
        report = {
            "command": "decompose",
            "seed": seed,
            "eps": eps,
            "density_N": [[float(v) for v in row] for row in dec.N],
            "density_A": [[float(v) for v in row] for row in dec.A],
            "singular_part": dec.nu_s.to_json_dict(),
            "support": [bool(b) for b in dec.support],
            "sites": [str(s) for s in dec.sites],
            "total_variation_mu": measures.total_variation(mu),
            "line_energy": measures.line_energy(mu, nu, eps),
            "Fprime_minus": fm,
            "Fprime_plus": fp,
            "Fsecond": measures.second_variation(mu, nu, eps),
            "singular_epsilons": measures.singular_epsilons(mu, nu),
        }
    except ValueError as exc:
        raise CliError(2, f"incompatible measures: {exc}") from exc
    _write_json(os.path.join(out, "decompose_report.json"), report)
    return 0


# ---- entry point ---------------------------------------------------------------

_COMMANDS = {
    "solve": (cmd_solve, "minimize the area energy for Dirichlet data"),
    "vary": (cmd_vary, "solve, then report first/second variation along a direction"),
    "verify": (cmd_verify, "run the acceptance suite and report pass/fail"),
    "area": (cmd_area, "evaluate an area density over a grid"),
    "curvature": (cmd_curvature, "evaluate a mean-curvature field over a grid"),
    "decompose": (cmd_decompose, "decompose a measure pair and report derivatives"),
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="areavar",
        description="generalized-area functionals: solver, variation, geometry",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument(
            "--config",
            required=(name != "verify"),
            help="path to the JSON run configuration",
        )
        sp.add_argument("--out", default=".", help="output directory (default: .)")
        sp.add_argument("--seed", type=int, default=None, help="RNG seed recorded in reports")
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command][0](args)
    except CliError as exc:
        diag = {"error": exc.message, "exit_code": exc.code, "command": args.command}
        print(to_json(diag), file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(to_json({"error": str(exc), "exit_code": 2, "command": args.command}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
