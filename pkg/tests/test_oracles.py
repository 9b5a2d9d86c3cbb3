"""Finite-difference referees and the closed-form scalar LQR solution."""

from pathlib import Path

import numpy as np
import pytest

from conftest import zero_cost_problem
from costate import (Dims, LqrSpec, ProblemDef, build_lqr, eval_cost,
                     fd_consistency, fd_gradient, fd_hessian, max_rel_error,
                     riccati_lqr)


class TestFdGradient:
    def test_lqr_hand_value(self, lqr1):
        g = fd_gradient(lqr1, 1.0, np.zeros(2), h=1e-6)
        np.testing.assert_allclose(g, [9.72, 0.0], atol=1e-6)

    def test_constant_cost(self):
        prob = zero_cost_problem()
        g = fd_gradient(prob, np.ones(2), np.zeros(prob.dims.z_len))
        assert np.abs(g).max() == 0.0

    def test_h_must_be_positive(self, lqr1):
        with pytest.raises(ValueError):
            fd_gradient(lqr1, 1.0, np.zeros(2), h=0.0)


class TestFdHessian:
    def test_lqr_hand_matrix(self, lqr1):
        h = fd_hessian(lqr1, 1.0, np.zeros(2), h=1e-6)
        np.testing.assert_allclose(h, [[10.86, 0.0], [0.0, 0.0]], atol=1e-5)

    def test_linear_cost_zero_curvature(self):
        prob = ProblemDef(
            dims=Dims(n=1, m=1, N=2),
            dynamics=lambda x, u, k: x + u,
            stage_cost=lambda x, u, k: float(3.0 * x[0] + 2.0 * u[0]),
            d_dynamics=lambda x, u, k: (np.eye(1), np.eye(1)),
            d_stage_cost=lambda x, u, k: (np.full(1, 3.0), np.full(1, 2.0)),
        )
        h = fd_hessian(prob, 0.5, np.zeros(3))
        assert np.abs(h).max() < 1e-9

    def test_symmetric_output(self, lqr15):
        h = fd_hessian(lqr15, 1.0, np.zeros(lqr15.dims.z_len))
        assert np.array_equal(h, h.T)


class TestRiccati:
    def test_costless_problem_is_all_zero(self):
        sol = riccati_lqr(1.8, 0.9, 0.0, 3.0, 0.0, 10, 2.0)
        assert np.abs(sol.gains).max() == 0.0
        assert np.abs(sol.controls).max() == 0.0
        assert sol.cost == 0.0

    def test_two_stage_hand_recursion(self):
        sol = riccati_lqr(1.8, 0.9, 1.0, 3.0, 3.0, 1, 1.0)
        k0 = 1.8 * 0.9 * 3.0 / (3.0 + 0.81 * 3.0)
        assert sol.gains[0] == pytest.approx(k0, rel=1e-14)
        assert sol.gains[0] == pytest.approx(0.8950, abs=1e-4)
        assert sol.controls[0] == pytest.approx(-k0, rel=1e-14)

    def test_cost_matches_rollout_evaluation(self, lqr15):
        spec = LqrSpec()
        sol = riccati_lqr(spec.a, spec.b, spec.q, spec.r, spec.p_term,
                          spec.N, 2.0)
        z = np.append(sol.controls, 0.0)
        assert eval_cost(lqr15, 2.0, z) == pytest.approx(sol.cost, rel=1e-12)

    def test_local_minimum_spot_check(self, lqr15):
        """1000 random perturbations never beat the closed-form controls."""
        spec = LqrSpec()
        sol = riccati_lqr(spec.a, spec.b, spec.q, spec.r, spec.p_term,
                          spec.N, 1.0)
        z_star = np.append(sol.controls, 0.0)
        j_star = eval_cost(lqr15, 1.0, z_star)
        rng = np.random.default_rng(99)
        for _ in range(1000):
            z = z_star + rng.normal(scale=0.01, size=z_star.size)
            assert eval_cost(lqr15, 1.0, z) >= j_star - 1e-12

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            riccati_lqr(1.0, 1.0, 1.0, 0.0, 1.0, 3, 1.0)
        with pytest.raises(ValueError):
            riccati_lqr(1.0, 1.0, -1.0, 1.0, 1.0, 3, 1.0)


class TestFdConsistency:
    def test_flags_sign_flipped_oracle(self):
        base = build_lqr(LqrSpec(N=4))
        flipped = ProblemDef(
            dims=base.dims, dynamics=base.dynamics,
            stage_cost=base.stage_cost,
            d_dynamics=lambda x, u, k: tuple(-np.asarray(j)
                                             for j in base.d_dynamics(x, u, k)),
            d_stage_cost=base.d_stage_cost,
            dd_stage_cost=base.dd_stage_cost,
            dd_dynamics_contracted=base.dd_dynamics_contracted,
        )
        errs = fd_consistency(flipped, np.random.default_rng(0), n_points=10)
        assert errs["d_dynamics"] > 1e-2
        assert errs["d_stage_cost"] <= 1e-5

    def test_clean_problem_passes(self):
        base = build_lqr(LqrSpec(N=4))
        errs = fd_consistency(base, np.random.default_rng(0), n_points=25)
        assert max(errs.values()) <= 1e-5


def test_oracles_do_not_touch_curvature_code():
    """The referee stays independent of the module it referees."""
    source = (Path(__file__).resolve().parent.parent / "src" / "costate"
              / "oracles.py").read_text()
    assert "curvature" not in source


def test_max_rel_error_uses_unit_floor():
    assert max_rel_error(np.array([1e-7]), np.array([0.0])) == 1e-7
    assert max_rel_error(np.array([2.0]), np.array([4.0])) == pytest.approx(0.5)
