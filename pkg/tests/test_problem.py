"""Rollout, decision-vector layout, and the finite-difference constructor."""

import numpy as np
import pytest

from costate import (DimensionMismatchError, Dims, NumericalBlowupError,
                     ProblemDef, UnicycleSpec, build_unicycle_tracking,
                     eval_cost, flat_index, make_fd_problem, roll_forward,
                     stage_controls)


class TestDims:
    def test_z_len(self):
        assert Dims(n=3, m=2, N=9).z_len == 20
        assert Dims(n=1, m=1, N=0).z_len == 1

    @pytest.mark.parametrize("kwargs", [
        dict(n=0, m=1, N=1), dict(n=1, m=0, N=1), dict(n=1, m=1, N=-1),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            Dims(**kwargs)

    def test_flat_index_bijection(self):
        dims = Dims(n=2, m=3, N=4)
        seen = set()
        for k in range(dims.N + 1):
            for p in range(dims.m):
                idx = flat_index(dims, k, p)
                assert idx == k * dims.m + p
                seen.add(idx)
        assert seen == set(range(dims.z_len))

    def test_flat_index_bounds(self):
        dims = Dims(n=1, m=2, N=3)
        with pytest.raises(DimensionMismatchError):
            flat_index(dims, 4, 0)
        with pytest.raises(DimensionMismatchError):
            flat_index(dims, 0, 2)

    def test_stage_controls_layout(self):
        dims = Dims(n=1, m=2, N=2)
        z = np.arange(6.0)
        u = stage_controls(z, dims)
        assert u.shape == (3, 2)
        assert u[1, 0] == z[flat_index(dims, 1, 0)]
        assert u[2, 1] == z[flat_index(dims, 2, 1)]


class TestRollForward:
    def test_lqr_two_stages(self, lqr1):
        """x0=1, zero controls: states [1, 1.8], cost 1 + 3*1.8^2 = 10.72."""
        roll = roll_forward(lqr1, 1.0, np.zeros(2))
        np.testing.assert_allclose(roll.states.ravel(), [1.0, 1.8])
        assert roll.total_cost == pytest.approx(10.72, rel=1e-12)
        np.testing.assert_allclose(roll.stage_costs,
                                   [1.0, 3.0 * 1.8 ** 2], rtol=1e-12)

    def test_single_stage_is_just_the_stage_cost(self, lqr1):
        spec_prob = lqr1
        dims = Dims(n=1, m=1, N=0)
        prob = ProblemDef(
            dims=dims,
            dynamics=spec_prob.dynamics,
            stage_cost=lambda x, u, k: 2.5 * x[0] ** 2 + u[0],
            d_dynamics=spec_prob.d_dynamics,
            d_stage_cost=lambda x, u, k: (np.array([5.0 * x[0]]), np.ones(1)),
        )
        roll = roll_forward(prob, 2.0, np.array([0.5]))
        assert roll.states.shape == (1, 1)
        assert roll.total_cost == 2.5 * 4.0 + 0.5

    def test_unicycle_straight_line(self):
        spec = UnicycleSpec(N=10, N_p=2)
        prob = build_unicycle_tracking(spec, 0, np.zeros(3))
        z = np.array([1.0, 0.0, 1.0, 0.0, 1.0, 0.0])
        roll = roll_forward(prob, np.zeros(3), z)
        np.testing.assert_allclose(
            roll.states, [[0, 0, 0], [0.05, 0, 0], [0.1, 0, 0]], atol=1e-15)

    def test_bad_x0_named(self, lqr1):
        with pytest.raises(DimensionMismatchError, match="x0"):
            roll_forward(lqr1, np.zeros(2), np.zeros(2))

    def test_bad_z_length_named(self, lqr1):
        with pytest.raises(DimensionMismatchError, match="decision vector"):
            roll_forward(lqr1, 1.0, np.zeros(3))

    def test_blowup_reports_stage(self):
        def dyn(x, u, k):
            return np.array([np.inf]) if k == 1 else x + u

        prob = ProblemDef(
            dims=Dims(n=1, m=1, N=3),
            dynamics=dyn,
            stage_cost=lambda x, u, k: float(x[0] ** 2),
            d_dynamics=lambda x, u, k: (np.eye(1), np.eye(1)),
            d_stage_cost=lambda x, u, k: (2 * x, np.zeros(1)),
        )
        with pytest.raises(NumericalBlowupError, match="numerical blow-up at stage 1") as err:
            roll_forward(prob, 1.0, np.zeros(4))
        assert err.value.stage == 1

    def test_nan_cost_reports_stage(self, lqr1):
        prob = ProblemDef(
            dims=lqr1.dims,
            dynamics=lqr1.dynamics,
            stage_cost=lambda x, u, k: float("nan") if k == 1 else 0.0,
            d_dynamics=lqr1.d_dynamics,
            d_stage_cost=lqr1.d_stage_cost,
        )
        with pytest.raises(NumericalBlowupError) as err:
            roll_forward(prob, 1.0, np.zeros(2))
        assert err.value.stage == 1

    def test_replay_determinism(self, lqr15):
        z = np.linspace(-1, 1, lqr15.dims.z_len)
        a = roll_forward(lqr15, 2.0, z)
        b = roll_forward(lqr15, 2.0, z)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.stage_costs, b.stage_costs)
        assert a.total_cost == b.total_cost

    def test_cost_decomposition_exact(self, lqr15):
        z = np.linspace(-0.5, 0.5, lqr15.dims.z_len)
        roll = roll_forward(lqr15, 1.5, z)
        total = 0.0
        for c in roll.stage_costs:
            total += c
        assert roll.total_cost == total


class TestEvalCost:
    def test_matches_rollout(self, lqr1):
        z = np.array([0.3, -0.2])
        assert eval_cost(lqr1, 1.0, z) == roll_forward(lqr1, 1.0, z).total_cost

    def test_zero_cost(self):
        from conftest import zero_cost_problem
        prob = zero_cost_problem()
        assert eval_cost(prob, np.ones(2), np.ones(prob.dims.z_len)) == 0.0

    def test_quadratic_scaling_brute_force(self, lqr1):
        # Independent replay of the recursion, evaluated at 2z.
        z = np.array([0.4, -0.1])
        a, b, q, r, pt = 1.8, 0.9, 1.0, 3.0, 3.0
        x0 = 1.2
        x1 = a * x0 + b * (2 * z[0])
        expected = q * x0 ** 2 + r * (2 * z[0]) ** 2 + pt * x1 ** 2
        assert eval_cost(lqr1, x0, 2 * z) == pytest.approx(expected, rel=1e-14)


class TestFdProblem:
    def test_linear_dynamics_near_exact(self):
        a, b = 1.7, -0.4
        dims = Dims(n=1, m=1, N=3)
        prob = make_fd_problem(lambda x, u, k: np.array([a * x[0] + b * u[0]]),
                               lambda x, u, k: 0.0, dims)
        fx, fu = prob.d_dynamics(np.array([0.3]), np.array([-1.1]), 0)
        assert abs(fx[0, 0] - a) < 1e-8
        assert abs(fu[0, 0] - b) < 1e-8

    def test_quadratic_cost_curvature(self):
        q = 2.5
        dims = Dims(n=1, m=1, N=1)
        prob = make_fd_problem(lambda x, u, k: x + u,
                               lambda x, u, k: q * float(x[0] ** 2), dims)
        cxx, cxu, cuu = prob.dd_stage_cost(np.array([0.7]), np.array([0.1]), 0)
        assert abs(cxx[0, 0] - 2 * q) < 1e-6
        assert abs(cxu[0, 0]) < 1e-6
        assert abs(cuu[0, 0]) < 1e-6

    def test_unicycle_heading_column_zero_at_zero_heading(self):
        delta = 0.05

        def dyn(x, u, k):
            return np.array([
                x[0] + delta * u[0] * np.cos(x[2]),
                x[1] + delta * u[0] * np.sin(x[2]),
                x[2] + delta * u[1],
            ])

        prob = make_fd_problem(dyn, lambda x, u, k: 0.0, Dims(n=3, m=2, N=2))
        fx, _ = prob.d_dynamics(np.zeros(3), np.array([1.0, 0.0]), 0)
        # d(next x)/d(heading) = -delta * speed * sin(0) = 0
        assert abs(fx[0, 2]) < 1e-9

    def test_step_must_be_positive(self):
        with pytest.raises(ValueError, match="step"):
            make_fd_problem(lambda x, u, k: x, lambda x, u, k: 0.0,
                            Dims(n=1, m=1, N=1), step=0.0)
