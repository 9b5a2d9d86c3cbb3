"""Command-line interface: exit codes, file outputs, validation suites."""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from costate import LqrSpec, ProblemDef, build_lqr
from costate.cli import main, run_check_suites

REPO = Path(__file__).resolve().parent.parent


def _write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestRunLqr:
    def test_benchmark_config_passes(self, tmp_path):
        rc = main(["run-lqr", "--config", str(REPO / "configs" / "lqr.json"),
                   "--out", str(tmp_path)])
        assert rc == 0
        rows = _read_csv(tmp_path / "lqr_trace.csv")
        assert rows[0] == ["k", "x_solver", "u_solver", "x_riccati",
                           "u_riccati"]
        assert len(rows) == 17  # header + stages 0..15
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["schema_version"] == 1
        assert report["passed"] is True
        assert report["max_control_deviation"] <= 1e-4
        assert report["termination"] == "Converged"

    def test_negative_r_names_the_field(self, tmp_path, capsys):
        cfg = _write_config(tmp_path, {"scenario": {"r": -3.0}})
        rc = main(["run-lqr", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 2
        assert "'r'" in capsys.readouterr().err

    def test_zero_initial_state_all_zero_controls(self, tmp_path):
        cfg = _write_config(tmp_path, {"scenario": {"x0": 0.0}})
        rc = main(["run-lqr", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 0
        rows = _read_csv(tmp_path / "lqr_trace.csv")[1:]
        assert all(float(row[2]) == 0.0 for row in rows)

    def test_unknown_field_rejected(self, tmp_path, capsys):
        cfg = _write_config(tmp_path, {"scenario": {"alpha": 1.0}})
        rc = main(["run-lqr", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 2
        assert "alpha" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        rc = main(["run-lqr", "--config", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path)])
        assert rc == 2
        assert "not found" in capsys.readouterr().err

    def test_invalid_json_reports_position(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{\n  broken\n}")
        rc = main(["run-lqr", "--config", str(bad), "--out", str(tmp_path)])
        assert rc == 2
        assert "line" in capsys.readouterr().err


class TestRunMpc:
    def _short_config(self, tmp_path, **scenario_overrides):
        scenario = {"N": 80}
        scenario.update(scenario_overrides)
        return _write_config(tmp_path, {"scenario": scenario})

    def test_short_run_passes(self, tmp_path):
        cfg = self._short_config(tmp_path)
        rc = main(["run-mpc", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 0
        rows = _read_csv(tmp_path / "mpc_trace.csv")
        assert rows[0] == ["k", "t", "x", "y", "theta", "v", "omega", "x_r",
                           "y_r", "theta_r", "pos_error", "iters", "solve_ms"]
        assert len(rows) == 81
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["schema_version"] == 1
        assert report["passed"] is True
        assert report["steady_state"]["max_pos_error_m"] <= 0.02
        assert report["max_iters"] <= 30
        assert sum(report["iteration_histogram"].values()) == 80

    def test_horizon_longer_than_run_rejected(self, tmp_path, capsys):
        cfg = self._short_config(tmp_path, N=5, N_p=10)
        rc = main(["run-mpc", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 2
        assert "N_p" in capsys.readouterr().err

    def test_baseline_comparison(self, tmp_path):
        # Short run; thresholds widened since 1.5 s is inside the transient.
        cfg = _write_config(tmp_path, {
            "scenario": {"N": 30},
            "baseline": {"lr": 0.05, "max_iters": 3000},
            "output": {"transient_time_s": 1.0, "max_pos_error_m": 1.0,
                       "max_heading_error_rad": 1.0},
        })
        rc = main(["run-mpc", "--config", cfg, "--baseline", "gd",
                   "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "report.json").read_text())
        gd = report["baseline"]
        assert len(gd["per_step_iters"]) == 30
        assert len(report["per_step_iters"]) == 30
        assert report["median_iters"] < gd["median_iters"]


class TestCheck:
    def test_small_sizes_pass(self, tmp_path, capsys):
        rc = main(["check", "--seed", "3", "--sizes", "2,1,5;1,1,0",
                   "--out", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "fd-consistency" in out and "PASS" in out
        report = json.loads((tmp_path / "check_report.json").read_text())
        assert report["passed"] is True
        assert {s["name"] for s in report["suites"]} == {
            "fd-consistency", "gradient-vs-fd", "hessian-vs-fd",
            "hessian-symmetry", "rollout-sensitivity", "lqr-riccati"}

    def test_degenerate_size_passes(self):
        results = run_check_suites(seed=0, sizes=[(1, 1, 0)])
        assert all(r.passed for r in results)

    def test_malformed_sizes_rejected(self, capsys):
        rc = main(["check", "--sizes", "2,1"])
        assert rc == 2
        assert "sizes" in capsys.readouterr().err

    def test_failing_suite_exits_1_and_names_the_property(self, monkeypatch,
                                                          capsys):
        from costate import cli as cli_mod

        def fake_suites(seed=0, sizes=None, extra_problems=None):
            return [cli_mod.SuiteResult(name="fd-consistency", passed=False,
                                        max_error=0.42, tolerance=1e-5,
                                        detail=f"seed {seed}, problem bad")]

        monkeypatch.setattr(cli_mod, "run_check_suites", fake_suites)
        rc = main(["check", "--seed", "5"])
        assert rc == 1
        err = capsys.readouterr().err
        assert "fd-consistency" in err and "seed 5" in err

    def test_unbounded_inner_depth_accepted(self, tmp_path):
        cfg = _write_config(tmp_path, {
            "scenario": {"x0": 0.5},
            "solver": {"inner_depth_cap": "unbounded"},
        })
        assert main(["run-lqr", "--config", cfg, "--out", str(tmp_path)]) == 0

    def test_injected_sign_flip_fails_fd_consistency(self):
        base = build_lqr(LqrSpec(N=4))
        flipped = ProblemDef(
            dims=base.dims, dynamics=base.dynamics,
            stage_cost=base.stage_cost,
            d_dynamics=lambda x, u, k: tuple(
                -np.asarray(j) for j in base.d_dynamics(x, u, k)),
            d_stage_cost=base.d_stage_cost,
            dd_stage_cost=base.dd_stage_cost,
            dd_dynamics_contracted=base.dd_dynamics_contracted,
        )
        results = run_check_suites(
            seed=0, sizes=[(2, 1, 4)],
            extra_problems=[("sign-flipped", flipped, np.array([1.0]),
                             np.zeros(5))])
        by_name = {r.name: r for r in results}
        assert not by_name["fd-consistency"].passed
        assert "sign-flipped" in by_name["fd-consistency"].detail


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["run-lqr"])  # missing --config
    assert err.value.code == 2
