"""Command-line entry point.

Three commands:

    run-lqr --config F [--out DIR]     solve the scalar LQR scenario and
                                       compare against the closed-form
                                       solution
    run-mpc --config F [--baseline gd] [--out DIR]
                                       run the unicycle tracking scenario
                                       under the receding-horizon driver
    check [--seed S] [--sizes LIST] [--out DIR]
                                       run the validation suites on seeded
                                       random problems plus the bundled
                                       scenarios

Exit codes: 0 pass, 1 quantitative failure, 2 usage or config error.
Configs are JSON with sections {scenario, solver, mpc, baseline, output};
missing fields fall back to the scenario defaults.  CSV and JSON outputs
are deterministic for a fixed config and seed, except for the documented
wall-time fields.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .adjoint import forward_adjoint, gradient
from .curvature import RowIndex, _assemble, _stage_data, hessian, hessian_row
from .mpc import MpcConfig, WarmStart, run_mpc
from .oracles import (fd_consistency, fd_gradient, fd_hessian, max_rel_error,
                      riccati_lqr)
from .problem import roll_forward
from .scenarios import (CircleReference, LqrSpec, UnicycleSpec, WaypointTable,
                        build_lqr, build_unicycle_plant,
                        build_unicycle_tracking, circle_reference,
                        random_smooth_problem, tracking_sampler, wrap_angle)
from .solver import SolverConfig, Termination, minimize, minimize_gd

SCHEMA_VERSION = 1

DEFAULT_CHECK_SIZES: Tuple[Tuple[int, int, int], ...] = (
    (2, 1, 6), (3, 2, 8), (4, 3, 12), (1, 1, 0)
)


class ConfigError(Exception):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config error in field '{field}': {message}")


# ---------------------------------------------------------------------------
# Config handling
# ---------------------------------------------------------------------------

LQR_DEFAULTS = {
    "scenario": {"a": 1.8, "b": 0.9, "q": 1.0, "r": 3.0, "p_term": 3.0,
                 "N": 15, "x0": 1.0},
    "solver": {"r_reg": 0.1, "grad_tol": 1e-6, "max_outer": 50,
               "inner_depth_cap": 20, "fallback_scale": 10.0},
    "output": {"tolerance": 1e-4},
}

MPC_DEFAULTS = {
    "scenario": {"delta": 0.05, "N": 410, "N_p": 10, "X0": [1.0, 0.5, 1.0],
                 "Q_weights": [150.0, 150.0, 3.0], "R_weights": [0.5, 0.5],
                 "reference": {"type": "circle", "center": [0.0, 0.0],
                               "radius": 1.0, "angular_rate": 0.3}},
    "solver": {"r_reg": 0.1, "grad_tol": 1e-6, "max_outer": 50,
               "inner_depth_cap": 20, "fallback_scale": 10.0},
    "mpc": {"warm_start": "zero"},
    "baseline": {"lr": 0.05, "max_iters": 5000},
    "output": {"max_pos_error_m": 0.02, "max_heading_error_rad": 0.05,
               "transient_time_s": 3.0},
}


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError("config", f"file not found: {path}")
    try:
        with p.open("r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            "config", f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return data


def _merge(defaults: dict, user: dict, prefix: str = "") -> dict:
    out = {}
    for key, dval in defaults.items():
        if key in user:
            uval = user[key]
            if isinstance(dval, dict):
                if not isinstance(uval, dict):
                    raise ConfigError(prefix + key, "expected an object")
                out[key] = _merge(dval, uval, prefix + key + ".")
            else:
                out[key] = uval
        else:
            out[key] = dval
    for key in user:
        if key not in defaults:
            raise ConfigError(prefix + key, "unknown field")
    return out


def _require_number(cfg: dict, section: str, key: str, *, positive=False,
                    non_negative=False) -> float:
    val = cfg[section][key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(key, f"expected a number, got {val!r}")
    if positive and not val > 0:
        raise ConfigError(key, f"must be > 0, got {val}")
    if non_negative and val < 0:
        raise ConfigError(key, f"must be >= 0, got {val}")
    return float(val)


def _require_int(cfg: dict, section: str, key: str, minimum: int) -> int:
    val = cfg[section][key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(key, f"expected an integer, got {val!r}")
    if val < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {val}")
    return val


def _solver_config(cfg: dict) -> SolverConfig:
    sec = cfg["solver"]
    cap = sec["inner_depth_cap"]
    if cap == "unbounded":
        cap = None
    if cap is not None and (isinstance(cap, bool) or not isinstance(cap, int)
                            or cap < 0):
        raise ConfigError("inner_depth_cap", "must be a non-negative integer, "
                          "null, or \"unbounded\"")
    return SolverConfig(
        r_reg=_require_number(cfg, "solver", "r_reg", positive=True),
        grad_tol=_require_number(cfg, "solver", "grad_tol", positive=True),
        max_outer=_require_int(cfg, "solver", "max_outer", 1),
        inner_depth_cap=cap,
        fallback_scale=_require_number(cfg, "solver", "fallback_scale",
                                       positive=True),
    )


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _fmt_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])


def _write_json(path: Path, obj: dict) -> None:
    with path.open("w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# run-lqr
# ---------------------------------------------------------------------------

def cmd_run_lqr(config_path: str, out_dir: str) -> int:
    cfg = _merge(LQR_DEFAULTS, _load_json(config_path))
    a = _require_number(cfg, "scenario", "a")
    b = _require_number(cfg, "scenario", "b")
    q = _require_number(cfg, "scenario", "q", non_negative=True)
    r = _require_number(cfg, "scenario", "r", positive=True)
    p_term = _require_number(cfg, "scenario", "p_term", non_negative=True)
    n_last = _require_int(cfg, "scenario", "N", 1)
    x0 = _require_number(cfg, "scenario", "x0")
    tol = _require_number(cfg, "output", "tolerance", positive=True)
    solver_cfg = _solver_config(cfg)

    spec = LqrSpec(a=a, b=b, q=q, r=r, p_term=p_term, N=n_last, x0=x0)
    prob = build_lqr(spec)
    report = minimize(prob, np.array([x0]), np.zeros(prob.dims.z_len), solver_cfg)
    roll = roll_forward(prob, np.array([x0]), report.z_final)
    ric = riccati_lqr(a, b, q, r, p_term, n_last, x0)

    u_ric = np.append(ric.controls, 0.0)
    max_u_dev = float(np.abs(report.z_final - u_ric).max())
    max_x_dev = float(np.abs(roll.states[:, 0] - ric.states).max())
    passed = report.termination is Termination.CONVERGED and max_u_dev <= tol

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        (k, float(roll.states[k, 0]), float(report.z_final[k]),
         float(ric.states[k]), float(u_ric[k]))
        for k in range(n_last + 1)
    ]
    _write_csv(out / "lqr_trace.csv",
               ["k", "x_solver", "u_solver", "x_riccati", "u_riccati"], rows)
    _write_json(out / "report.json", {
        "schema_version": SCHEMA_VERSION,
        "command": "run-lqr",
        "scenario": cfg["scenario"],
        "termination": report.termination.value,
        "outer_iters": report.outer_iters,
        "inner_iters_total": report.inner_iters_total,
        "grad_norm_history": [float(v) for v in report.grad_norm_history],
        "max_control_deviation": max_u_dev,
        "max_state_deviation": max_x_dev,
        "tolerance": tol,
        "passed": passed,
        "wall_time_s": report.wall_time,
    })
    print(f"run-lqr: {'PASS' if passed else 'FAIL'} "
          f"(max control deviation {max_u_dev:.3e}, tolerance {tol:.1e}, "
          f"{report.outer_iters} outer iterations)")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# run-mpc
# ---------------------------------------------------------------------------

def _unicycle_spec(cfg: dict) -> UnicycleSpec:
    sc = cfg["scenario"]
    delta = _require_number(cfg, "scenario", "delta", positive=True)
    total = _require_int(cfg, "scenario", "N", 1)
    horizon = _require_int(cfg, "scenario", "N_p", 1)
    if horizon > total:
        raise ConfigError("N_p", f"prediction horizon {horizon} exceeds total "
                          f"steps N={total}")
    x0 = sc["X0"]
    if not (isinstance(x0, list) and len(x0) == 3
            and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                    for v in x0)):
        raise ConfigError("X0", f"expected a list of three numbers, got {x0!r}")
    qw = sc["Q_weights"]
    rw = sc["R_weights"]
    if not (isinstance(qw, list) and len(qw) == 3
            and all(isinstance(v, (int, float)) and v >= 0 for v in qw)):
        raise ConfigError("Q_weights", "expected three non-negative numbers")
    if not (isinstance(rw, list) and len(rw) == 2
            and all(isinstance(v, (int, float)) and v > 0 for v in rw)):
        raise ConfigError("R_weights", "expected two positive numbers")
    ref = sc["reference"]
    if not isinstance(ref, dict) or "type" not in ref:
        raise ConfigError("reference", "expected an object with a 'type'")
    if ref["type"] == "circle":
        defaults = MPC_DEFAULTS["scenario"]["reference"]
        merged = dict(defaults)
        merged.update(ref)
        for key in ref:
            if key not in defaults:
                raise ConfigError(f"reference.{key}", "unknown field")
        if not (isinstance(merged["radius"], (int, float))
                and merged["radius"] > 0):
            raise ConfigError("reference.radius", "must be > 0")
        reference = CircleReference(center=tuple(merged["center"]),
                                    radius=float(merged["radius"]),
                                    angular_rate=float(merged["angular_rate"]))
    elif ref["type"] == "table":
        try:
            reference = WaypointTable(states=np.asarray(ref["states"], float),
                                      controls=np.asarray(ref["controls"], float))
        except (KeyError, ValueError) as exc:
            raise ConfigError("reference", str(exc)) from exc
    else:
        raise ConfigError("reference.type", f"unknown type {ref['type']!r}")
    return UnicycleSpec(delta=delta, N=total, N_p=horizon, X0=tuple(x0),
                        Q_weights=tuple(float(v) for v in qw),
                        R_weights=tuple(float(v) for v in rw),
                        reference=reference)


def _reference_rows(spec: UnicycleSpec, step: int):
    if isinstance(spec.reference, WaypointTable):
        return spec.reference.states[step], spec.reference.controls[step]
    return circle_reference(spec.reference, spec.delta, step)


def cmd_run_mpc(config_path: str, out_dir: str, baseline: Optional[str]) -> int:
    cfg = _merge(MPC_DEFAULTS, _load_json(config_path))
    spec = _unicycle_spec(cfg)
    solver_cfg = _solver_config(cfg)
    warm = cfg["mpc"]["warm_start"]
    if warm not in ("zero", "shift"):
        raise ConfigError("warm_start", f"expected 'zero' or 'shift', got {warm!r}")
    mpc_cfg = MpcConfig(horizon=spec.N_p, total_steps=spec.N,
                        warm_start=WarmStart(warm), solver=solver_cfg)
    max_pos = _require_number(cfg, "output", "max_pos_error_m", positive=True)
    max_heading = _require_number(cfg, "output", "max_heading_error_rad",
                                  positive=True)
    transient = _require_number(cfg, "output", "transient_time_s",
                                non_negative=True)

    plant = build_unicycle_plant(spec)
    x_init = np.asarray(spec.X0, dtype=float)

    def factory(state, step):
        return build_unicycle_tracking(spec, step, state)

    trace = run_mpc(plant, factory, x_init, mpc_cfg)
    steps_done = trace.applied_controls.shape[0]

    rows = []
    pos_errors = np.empty(steps_done)
    heading_errors = np.empty(steps_done)
    times = np.arange(steps_done) * spec.delta
    for k in range(steps_done):
        state = trace.applied_states[k]
        ctrl = trace.applied_controls[k]
        xr, _ = _reference_rows(spec, k)
        pos_errors[k] = float(np.hypot(state[0] - xr[0], state[1] - xr[1]))
        heading_errors[k] = abs(wrap_angle(state[2] - xr[2]))
        rows.append((
            k, float(times[k]), float(state[0]), float(state[1]),
            float(state[2]), float(ctrl[0]), float(ctrl[1]), float(xr[0]),
            float(xr[1]), float(xr[2]), float(pos_errors[k]),
            trace.per_step_reports[k].outer_iters,
            float(trace.per_step_wall_time[k] * 1e3),
        ))

    iters = [rep.outer_iters for rep in trace.per_step_reports[:steps_done]]
    steady = times > transient
    steady_any = bool(steady.any())
    max_pos_err = float(pos_errors[steady].max()) if steady_any else float("nan")
    mean_pos_err = float(pos_errors[steady].mean()) if steady_any else float("nan")
    max_heading_err = (float(heading_errors[steady].max()) if steady_any
                       else float("nan"))

    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "run-mpc",
        "steps_completed": steps_done,
        "failed_step": trace.failed_step,
        "steady_state": {
            "transient_time_s": transient,
            "max_pos_error_m": max_pos_err,
            "mean_pos_error_m": mean_pos_err,
            "max_heading_error_rad": max_heading_err,
        },
        "thresholds": {"max_pos_error_m": max_pos, "max_heading_error_rad":
                       max_heading},
        "iteration_histogram": {str(k): v for k, v in
                                sorted(Counter(iters).items())},
        "median_iters": float(statistics.median(iters)) if iters else None,
        "max_iters": max(iters) if iters else None,
        "total_wall_time_s": float(trace.per_step_wall_time.sum()),
    }

    if baseline == "gd":
        lr = _require_number(cfg, "baseline", "lr", positive=True)
        gd_max = _require_int(cfg, "baseline", "max_iters", 1)

        def gd_solve(prob, x, z0, scfg):
            return minimize_gd(prob, x, z0, lr=lr, grad_tol=scfg.grad_tol,
                               max_iters=gd_max)

        gd_trace = run_mpc(plant, factory, x_init, mpc_cfg, _solve=gd_solve)
        gd_iters = [rep.outer_iters for rep in gd_trace.per_step_reports]
        report["baseline"] = {
            "method": "gd",
            "lr": lr,
            "max_iters": gd_max,
            "per_step_iters": gd_iters,
            "median_iters": float(statistics.median(gd_iters)) if gd_iters else None,
            "steps_at_cap": sum(1 for v in gd_iters if v >= gd_max),
            "total_wall_time_s": float(gd_trace.per_step_wall_time.sum()),
        }
        report["per_step_iters"] = iters

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "mpc_trace.csv",
               ["k", "t", "x", "y", "theta", "v", "omega", "x_r", "y_r",
                "theta_r", "pos_error", "iters", "solve_ms"], rows)

    if trace.failed_step is not None:
        report["passed"] = False
        _write_json(out / "report.json", report)
        print(f"run-mpc: FAIL (solver failure at step {trace.failed_step})",
              file=sys.stderr)
        return 1

    passed = (steady_any and max_pos_err <= max_pos
              and max_heading_err <= max_heading)
    report["passed"] = passed
    _write_json(out / "report.json", report)
    print(f"run-mpc: {'PASS' if passed else 'FAIL'} "
          f"(steady-state max position error {max_pos_err:.4f} m, "
          f"max heading error {max_heading_err:.4f} rad, "
          f"median iterations {report['median_iters']})")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

@dataclass
class SuiteResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    detail: str = ""


def _named_problems(seed: int, sizes: Sequence[Tuple[int, int, int]],
                    extra_problems=None):
    """(name, problem, x0, z, fd_sampler) tuples for the suites."""
    rng = np.random.default_rng(seed)
    problems = []
    for (n, m, n_last) in sizes:
        prob, x0, z = random_smooth_problem(rng, n, m, n_last)
        problems.append((f"random-n{n}m{m}N{n_last}", prob, x0, z, None))
    lqr = build_lqr(LqrSpec())
    problems.append(("lqr", lqr, np.array([1.0]),
                     rng.normal(scale=0.4, size=lqr.dims.z_len), None))
    uni_spec = UnicycleSpec()
    x_uni = np.asarray(uni_spec.X0) + rng.normal(scale=0.2, size=3)
    uni = build_unicycle_tracking(uni_spec, 3, x_uni)
    problems.append(("unicycle", uni, x_uni,
                     rng.normal(scale=0.3, size=uni.dims.z_len),
                     tracking_sampler(uni_spec, 3)))
    if extra_problems:
        for entry in extra_problems:
            problems.append(tuple(entry) if len(entry) == 5
                            else tuple(entry) + (None,))
    return rng, problems


def run_check_suites(seed: int = 0,
                     sizes: Optional[Sequence[Tuple[int, int, int]]] = None,
                     extra_problems=None) -> List[SuiteResult]:
    """Run the validation suites and return one result per suite.

    extra_problems is a hook for fault-injection tests: a list of
    (name, problem, x0, z) tuples appended to the generated set.
    """
    sizes = tuple(sizes) if sizes is not None else DEFAULT_CHECK_SIZES
    rng, problems = _named_problems(seed, sizes, extra_problems)
    results: List[SuiteResult] = []

    def record(name, tol, worst, where):
        results.append(SuiteResult(
            name=name, passed=worst <= tol, max_error=worst, tolerance=tol,
            detail=f"seed {seed}, problem {where}"))

    # Analytic oracles against finite differences of the raw callables.
    worst, where = 0.0, ""
    for name, prob, _, _, sampler in problems:
        errs = fd_consistency(prob, rng, n_points=30, sampler=sampler)
        err = max(errs.values())
        if err > worst:
            worst, where = err, name
    record("fd-consistency", 1e-5, worst, where)

    # Adjoint gradient against central differences of the cost.
    worst, where = 0.0, ""
    for name, prob, x0, z, _ in problems:
        err = max_rel_error(gradient(prob, x0, z).gradient,
                            fd_gradient(prob, x0, z, 1e-6))
        if err > worst:
            worst, where = err, name
    record("gradient-vs-fd", 1e-5, worst, where)

    # Assembled second-order matrix against differenced adjoint gradients.
    worst, where = 0.0, ""
    for name, prob, x0, z, _ in problems:
        err = max_rel_error(hessian(prob, x0, z), fd_hessian(prob, x0, z, 1e-6))
        if err > worst:
            worst, where = err, name
    record("hessian-vs-fd", 1e-4, worst, where)

    # Raw (pre-symmetrization) asymmetry, scaled.
    worst, where = 0.0, ""
    for name, prob, x0, z, _ in problems:
        roll, adj = forward_adjoint(prob, x0, z)
        raw = _assemble(prob.dims, _stage_data(prob, roll, adj.costates, z))
        defect = float(np.abs(raw - raw.T).max())
        err = defect / (1.0 + float(np.abs(raw).max(initial=0.0)))
        if err > worst:
            worst, where = err, name
    record("hessian-symmetry", 1e-8, worst, where)

    # Forward sensitivity sequences against differenced rollouts.
    worst, where = 0.0, ""
    for name, prob, x0, z, _ in problems:
        roll, adj = forward_adjoint(prob, x0, z)
        width = prob.dims.z_len
        if width <= 12:
            flats = range(width)
        else:
            flats = sorted(rng.choice(width, size=8, replace=False).tolist())
        for flat in flats:
            row = RowIndex.from_flat(prob.dims, int(flat))
            sp = hessian_row(prob, roll, adj, z, row)
            h = 1e-6
            zp, zm = z.copy(), z.copy()
            zp[flat] += h
            zm[flat] -= h
            sens = (roll_forward(prob, x0, zp).states
                    - roll_forward(prob, x0, zm).states) / (2.0 * h)
            err = max_rel_error(sp.betas, sens)
            if err > worst:
                worst, where = err, f"{name} row {flat}"
    record("rollout-sensitivity", 1e-5, worst, where)

    # Solver against the closed-form scalar LQR solution.
    worst, where = 0.0, ""
    lqr_spec = LqrSpec()
    lqr = build_lqr(lqr_spec)
    for x0_val in (1.0, 2.0, 3.0):
        rep = minimize(lqr, np.array([x0_val]), np.zeros(lqr.dims.z_len),
                       SolverConfig(r_reg=0.1))
        ric = riccati_lqr(lqr_spec.a, lqr_spec.b, lqr_spec.q, lqr_spec.r,
                          lqr_spec.p_term, lqr_spec.N, x0_val)
        dev = float(np.abs(rep.z_final[:lqr_spec.N] - ric.controls).max())
        if dev > worst:
            worst, where = dev, f"lqr x0={x0_val}"
    record("lqr-riccati", 1e-4, worst, where)

    return results


def _print_suite_table(results: List[SuiteResult]) -> None:
    width = max(len(r.name) for r in results)
    print(f"{'suite'.ljust(width)}  status  max error  tolerance")
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name.ljust(width)}  {status}    {r.max_error:.2e}   "
              f"{r.tolerance:.0e}")


def _parse_sizes(text: str) -> List[Tuple[int, int, int]]:
    sizes = []
    for chunk in text.split(";"):
        parts = chunk.split(",")
        if len(parts) != 3:
            raise ConfigError("sizes", f"expected 'n,m,N' triples separated "
                              f"by ';', got {chunk!r}")
        try:
            n, m, n_last = (int(v) for v in parts)
        except ValueError as exc:
            raise ConfigError("sizes", f"non-integer entry in {chunk!r}") from exc
        if n < 1 or m < 1 or n_last < 0:
            raise ConfigError("sizes", f"invalid dimensions {chunk!r}")
        sizes.append((n, m, n_last))
    return sizes


def cmd_check(seed: int, sizes_text: Optional[str],
              out_dir: Optional[str]) -> int:
    sizes = _parse_sizes(sizes_text) if sizes_text else None
    results = run_check_suites(seed=seed, sizes=sizes)
    print(f"validation suites, seed {seed}")
    _print_suite_table(results)
    failing = [r for r in results if not r.passed]
    for r in failing:
        print(f"FAILED: {r.name} (max error {r.max_error:.3e}, {r.detail})",
              file=sys.stderr)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "check_report.json", {
            "schema_version": SCHEMA_VERSION,
            "command": "check",
            "seed": seed,
            "sizes": [list(s) for s in (sizes or DEFAULT_CHECK_SIZES)],
            "suites": [{"name": r.name, "passed": r.passed,
                        "max_error": r.max_error, "tolerance": r.tolerance,
                        "detail": r.detail} for r in results],
            "passed": not failing,
        })
    return 0 if not failing else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="costate",
        description="Discrete-time optimal control: scenario runners and "
                    "validation suites.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_lqr = sub.add_parser("run-lqr", help="solve the scalar LQR scenario "
                           "and compare against the closed-form solution")
    p_lqr.add_argument("--config", required=True, help="JSON config file")
    p_lqr.add_argument("--out", default=".", help="output directory")

    p_mpc = sub.add_parser("run-mpc", help="run the unicycle tracking "
                           "scenario under the receding-horizon driver")
    p_mpc.add_argument("--config", required=True, help="JSON config file")
    p_mpc.add_argument("--baseline", choices=["gd"], default=None,
                       help="also run a gradient-descent baseline for "
                            "iteration-count comparison")
    p_mpc.add_argument("--out", default=".", help="output directory")

    p_check = sub.add_parser("check", help="run the validation suites")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--sizes", default=None,
                         help="problem sizes as 'n,m,N' triples separated "
                              "by ';' (default: %s)" % ";".join(
                                  ",".join(str(v) for v in s)
                                  for s in DEFAULT_CHECK_SIZES))
    p_check.add_argument("--out", default=None,
                         help="optional directory for check_report.json")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run-lqr":
            return cmd_run_lqr(args.config, args.out)
        if args.command == "run-mpc":
            return cmd_run_mpc(args.config, args.out, args.baseline)
        if args.command == "check":
            return cmd_check(args.seed, args.sizes, args.out)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command}")


def entry() -> None:
    raise SystemExit(main())
