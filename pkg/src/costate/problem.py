"""Problem definition and rollout for discrete-time optimal control.

A problem is the task

    minimize  sum_{k=0}^{N} cost(x_k, u_k, k)
    subject   x_{k+1} = f(x_k, u_k, k),  x_0 given,

optimized over the flat decision vector z = [u_0; u_1; ...; u_N] of length
m*(N+1).  The terminal control u_N stays in the layout even when the last
stage ignores it; such stages simply report zero cost and zero derivatives
for u, which pins the corresponding gradient entries to exactly zero.

All stage callables take the stage index k last, so tracking costs with
time-varying references and terminal-only costs need no wrapper types.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class DimensionMismatchError(ValueError):
    """An input does not match the problem dimensions; the message names the
    offending quantity and index."""


class NumericalBlowupError(FloatingPointError):
    """The dynamics or cost produced a non-finite value during a rollout."""

    def __init__(self, stage: int, what: str):
        self.stage = stage
        super().__init__(f"numerical blow-up at stage {stage} ({what})")


@dataclass(frozen=True)
class Dims:
    """Problem dimensions.

    Attributes:
        n: state dimension, >= 1.
        m: control dimension, >= 1.
        N: index of the last stage, >= 0 (stages run k = 0..N).
    """

    n: int
    m: int
    N: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"state dimension n must be >= 1, got {self.n}")
        if self.m < 1:
            raise ValueError(f"control dimension m must be >= 1, got {self.m}")
        if self.N < 0:
            raise ValueError(f"last stage index N must be >= 0, got {self.N}")

    @property
    def z_len(self) -> int:
        """Length of the flat decision vector, m*(N+1)."""
        return self.m * (self.N + 1)


def flat_index(dims: Dims, k: int, p: int) -> int:
    """Flat position of control component p at stage k (bijective layout)."""
    if not 0 <= k <= dims.N:
        raise DimensionMismatchError(f"stage index {k} outside 0..{dims.N}")
    if not 0 <= p < dims.m:
        raise DimensionMismatchError(
            f"control component {p} outside 0..{dims.m - 1}"
        )
    return k * dims.m + p


def stage_controls(z: np.ndarray, dims: Dims) -> np.ndarray:
    """View the decision vector as an (N+1, m) array, one row per stage."""
    z = np.asarray(z, dtype=float)
    if z.shape != (dims.z_len,):
        raise DimensionMismatchError(
            f"decision vector has shape {z.shape}, expected ({dims.z_len},) "
            f"for m={dims.m}, N={dims.N}"
        )
    return z.reshape(dims.N + 1, dims.m)


@dataclass(frozen=True)
class ProblemDef:
    """A discrete-time optimal control problem with derivative oracles.

    Required signatures (all pure functions):

        dynamics(x, u, k) -> next state, shape (n,)            stages 0..N-1
        stage_cost(x, u, k) -> float                           stages 0..N
        d_dynamics(x, u, k) -> (f_x (n,n), f_u (n,m))          stages 0..N-1
        d_stage_cost(x, u, k) -> (c_x (n,), c_u (m,))          stages 0..N
        dd_stage_cost(x, u, k) -> (c_xx (n,n), c_xu (n,m), c_uu (m,m))
        dd_dynamics_contracted(w, x, u, k)
            -> (w.f_xx (n,n), w.f_xu (n,m), w.f_uu (m,m))

    Second derivatives of the dynamics appear only contracted against a
    costate-like vector w, which is the shape the second-order sweeps need
    and avoids rank-3 tensor storage.  Dynamics callables (and their
    derivatives) are never invoked at stage N: the terminal costate is zero,
    so every term that would require them vanishes.

    ``dd_stage_cost`` and ``dd_dynamics_contracted`` may be None for
    problems that are only differentiated once; second-order computations
    then refuse to run.  Instances are immutable and safe to share across
    concurrent evaluations.
    """

    dims: Dims
    dynamics: Callable
    stage_cost: Callable
    d_dynamics: Callable
    d_stage_cost: Callable
    dd_stage_cost: Optional[Callable] = None
    dd_dynamics_contracted: Optional[Callable] = None


@dataclass(frozen=True)
class Rollout:
    """Forward simulation result.

    Attributes:
        states: (N+1, n) array, x_0..x_N.
        stage_costs: (N+1,) array of per-stage costs.
        total_cost: running sum of stage_costs in stage order.
    """

    states: np.ndarray
    stage_costs: np.ndarray
    total_cost: float


def check_state(x, n: int, what: str = "state") -> np.ndarray:
    """Coerce to a float vector of length n or raise a structured error."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (n,):
        raise DimensionMismatchError(f"{what} has shape {x.shape}, expected ({n},)")
    return x


def roll_forward(p: ProblemDef, x0, z: np.ndarray) -> Rollout:
    """Simulate the dynamics under the controls in z and accumulate cost.

    Args:
        p: problem definition.
        x0: initial state, shape (n,) (scalars accepted for n = 1).
        z: flat decision vector of length m*(N+1).

    Returns:
        A Rollout with states x_0..x_N, per-stage costs, and their sum.

    Raises:
        DimensionMismatchError: x0 or z has the wrong shape, naming it.
        NumericalBlowupError: dynamics or cost returned a non-finite value;
            the error carries the stage index.
    """
    dims = p.dims
    u = stage_controls(z, dims)
    x = check_state(x0, dims.n, "x0")
    states = np.empty((dims.N + 1, dims.n))
    costs = np.empty(dims.N + 1)
    states[0] = x
    total = 0.0
    for k in range(dims.N + 1):
        c = float(p.stage_cost(states[k], u[k], k))
        if not np.isfinite(c):
            raise NumericalBlowupError(k, "stage cost")
        costs[k] = c
        total += c
        if k < dims.N:
            nxt = np.atleast_1d(np.asarray(p.dynamics(states[k], u[k], k), dtype=float))
            if nxt.shape != (dims.n,):
                raise DimensionMismatchError(
                    f"dynamics returned shape {nxt.shape} at stage {k}, "
                    f"expected ({dims.n},)"
                )
            if not np.all(np.isfinite(nxt)):
                raise NumericalBlowupError(k, "dynamics")
            states[k + 1] = nxt
    return Rollout(states=states, stage_costs=costs, total_cost=total)


def eval_cost(p: ProblemDef, x0, z: np.ndarray) -> float:
    """Total rollout cost, the scalar objective the solvers minimize."""
    return roll_forward(p, x0, z).total_cost


# Central-difference step scales.  First derivatives use the fine step; the
# second-derivative differencing wraps the first-derivative estimates with
# the coarser step, which balances truncation against cancellation.
FD_STEP = 1e-6
FD_STEP_SECOND = 1e-4


def _coord_step(value: float, scale: float) -> float:
    return scale * max(1.0, abs(float(value)))


def make_fd_problem(dynamics, stage_cost, dims: Dims, step: float = FD_STEP) -> ProblemDef:
    """Build a ProblemDef whose derivative oracles are finite differences.

    First derivatives are central differences with per-coordinate step
    step*max(1, |coordinate|); second derivatives are nested central
    differences of those estimates with step 1e-4*max(1, |coordinate|).
    Useful both as a derivative-free constructor and as the independent
    reference when validating analytic oracles.

    Args:
        dynamics: callable (x, u, k) -> next state.
        stage_cost: callable (x, u, k) -> float.
        dims: problem dimensions.
        step: relative step for first derivatives, > 0.
    """
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step}")
    n, m = dims.n, dims.m

    def f(x, u, k):
        return np.atleast_1d(np.asarray(dynamics(x, u, k), dtype=float))

    def _jac(fun, x, u, k, wrt_x, out_rows, h_scale):
        base = x if wrt_x else u
        cols = []
        for j in range(base.size):
            h = _coord_step(base[j], h_scale)
            hi = base.copy()
            lo = base.copy()
            hi[j] += h
            lo[j] -= h
            if wrt_x:
                fp, fm = fun(hi, u, k), fun(lo, u, k)
            else:
                fp, fm = fun(x, hi, k), fun(x, lo, k)
            cols.append((np.asarray(fp, dtype=float) - np.asarray(fm, dtype=float)) / (2.0 * h))
        return np.column_stack(cols).reshape(out_rows, base.size)

    def d_dynamics(x, u, k):
        x = check_state(x, n)
        u = check_state(u, m, "control")
        fx = _jac(f, x, u, k, True, n, step)
        fu = _jac(f, x, u, k, False, n, step)
        return fx, fu

    def _cost_grads(x, u, k, h_scale):
        cx = np.empty(n)
        for j in range(n):
            h = _coord_step(x[j], h_scale)
            hi, lo = x.copy(), x.copy()
            hi[j] += h
            lo[j] -= h
            cx[j] = (stage_cost(hi, u, k) - stage_cost(lo, u, k)) / (2.0 * h)
        cu = np.empty(m)
        for j in range(m):
            h = _coord_step(u[j], h_scale)
            hi, lo = u.copy(), u.copy()
            hi[j] += h
            lo[j] -= h
            cu[j] = (stage_cost(x, hi, k) - stage_cost(x, lo, k)) / (2.0 * h)
        return cx, cu

    def d_stage_cost(x, u, k):
        x = check_state(x, n)
        u = check_state(u, m, "control")
        return _cost_grads(x, u, k, step)

    def _nested(grad_fun, x, u, k, wrt_x):
        # Outer central difference of a first-derivative estimate built with
        # the same coarse step; the finer first-order step would amplify its
        # own cancellation noise here.
        base = x if wrt_x else u
        cols = []
        for j in range(base.size):
            h = _coord_step(base[j], FD_STEP_SECOND)
            hi, lo = base.copy(), base.copy()
            hi[j] += h
            lo[j] -= h
            if wrt_x:
                gp, gm = grad_fun(hi, u, k), grad_fun(lo, u, k)
            else:
                gp, gm = grad_fun(x, hi, k), grad_fun(x, lo, k)
            cols.append((gp - gm) / (2.0 * h))
        return np.column_stack(cols)

    def dd_stage_cost(x, u, k):
        x = check_state(x, n)
        u = check_state(u, m, "control")
        gx = lambda xx, uu, kk: _cost_grads(xx, uu, kk, FD_STEP_SECOND)[0]
        gu = lambda xx, uu, kk: _cost_grads(xx, uu, kk, FD_STEP_SECOND)[1]
        cxx = _nested(gx, x, u, k, True)
        cxu = _nested(gx, x, u, k, False)
        cuu = _nested(gu, x, u, k, False)
        return 0.5 * (cxx + cxx.T), cxu, 0.5 * (cuu + cuu.T)

    def dd_dynamics_contracted(w, x, u, k):
        w = check_state(w, n, "contraction vector")
        x = check_state(x, n)
        u = check_state(u, m, "control")

        def g(xx, uu, kk):
            return float(w @ f(xx, uu, kk))

        def gx(xx, uu, kk):
            out = np.empty(n)
            for j in range(n):
                h = _coord_step(xx[j], FD_STEP_SECOND)
                hi, lo = xx.copy(), xx.copy()
                hi[j] += h
                lo[j] -= h
                out[j] = (g(hi, uu, kk) - g(lo, uu, kk)) / (2.0 * h)
            return out

        def gu(xx, uu, kk):
            out = np.empty(m)
            for j in range(m):
                h = _coord_step(uu[j], FD_STEP_SECOND)
                hi, lo = uu.copy(), uu.copy()
                hi[j] += h
                lo[j] -= h
                out[j] = (g(xx, hi, kk) - g(xx, lo, kk)) / (2.0 * h)
            return out

        wxx = _nested(gx, x, u, k, True)
        wxu = _nested(gx, x, u, k, False)
        wuu = _nested(gu, x, u, k, False)
        return 0.5 * (wxx + wxx.T), wxu, 0.5 * (wuu + wuu.T)

    return ProblemDef(
        dims=dims,
        dynamics=dynamics,
        stage_cost=stage_cost,
        d_dynamics=d_dynamics,
        d_stage_cost=d_stage_cost,
        dd_stage_cost=dd_stage_cost,
        dd_dynamics_contracted=dd_dynamics_contracted,
    )
