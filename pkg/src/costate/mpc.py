"""Receding-horizon driver.

At each plant step: build the horizon problem anchored at the current state
and absolute step, solve it, apply the first control, advance the plant.
The factory receives the absolute step so time-varying references stay
aligned with plant time.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

import numpy as np

from .problem import (DimensionMismatchError, NumericalBlowupError,
                      ProblemDef, check_state, stage_controls)
from .solver import LinearSolveError, SolveReport, SolverConfig, minimize


class WarmStart(Enum):
    ZERO = "zero"
    SHIFT = "shift"


@dataclass(frozen=True)
class MpcConfig:
    """Receding-horizon settings: prediction horizon N_p, number of plant
    steps, warm-start policy, and the per-step solver configuration."""

    horizon: int
    total_steps: int
    warm_start: WarmStart = WarmStart.ZERO
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.total_steps < 1:
            raise ValueError(f"total_steps must be >= 1, got {self.total_steps}")


@dataclass
class MpcTrace:
    """Closed-loop record.

    applied_states has one more row than applied_controls and replays
    exactly through the plant dynamics.  If a step's solve failed,
    failed_step holds its index, the failing report is the last entry of
    per_step_reports, and the trace stops there.
    """

    applied_states: np.ndarray
    applied_controls: np.ndarray
    per_step_reports: List[SolveReport]
    per_step_wall_time: np.ndarray
    failed_step: Optional[int] = None


def _shift_warm_start(z_prev: np.ndarray, dims) -> np.ndarray:
    # Drop stage 0, repeat the last meaningful control, keep the padding
    # stage as is (its entries never matter to the cost).
    u = stage_controls(z_prev, dims).copy()
    shifted = np.empty_like(u)
    if dims.N >= 2:
        shifted[:dims.N - 1] = u[1:dims.N]
        shifted[dims.N - 1] = u[dims.N - 1]
    else:
        shifted[0] = u[0]
    shifted[dims.N] = u[dims.N]
    return shifted.reshape(-1)


def run_mpc(plant: ProblemDef, ocp_factory: Callable, x0, cfg: MpcConfig,
            _solve: Optional[Callable] = None) -> MpcTrace:
    """Run the receding-horizon loop.

    Args:
        plant: problem definition acting as the simulator; only its
            dynamics are used, with the absolute step index.
        ocp_factory: callable (state, step) -> ProblemDef of horizon
            cfg.horizon, anchored at the given absolute step.
        x0: initial plant state.
        cfg: horizon length, number of steps, warm start, solver settings.
        _solve: override for the per-step solver (internal; used to drive
            the same loop with baseline optimizers).

    Returns:
        MpcTrace.  A step whose solve raises LinearSolveError truncates the
        trace, with the failing partial report attached.
    """
    solve = _solve if _solve is not None else minimize
    x = check_state(x0, plant.dims.n, "x0")
    states = [x.copy()]
    controls: List[np.ndarray] = []
    reports: List[SolveReport] = []
    walls: List[float] = []
    failed: Optional[int] = None
    z_prev: Optional[np.ndarray] = None

    for k in range(cfg.total_steps):
        prob = ocp_factory(x.copy(), k)
        if prob.dims.N != cfg.horizon:
            raise DimensionMismatchError(
                f"factory produced horizon {prob.dims.N}, expected {cfg.horizon}"
            )
        if prob.dims.n != plant.dims.n or prob.dims.m != plant.dims.m:
            raise DimensionMismatchError(
                f"factory dims ({prob.dims.n}, {prob.dims.m}) do not match "
                f"plant ({plant.dims.n}, {plant.dims.m})"
            )
        if cfg.warm_start is WarmStart.SHIFT and z_prev is not None:
            z0 = _shift_warm_start(z_prev, prob.dims)
        else:
            z0 = np.zeros(prob.dims.z_len)
        t0 = time.perf_counter()
        try:
            report = solve(prob, x, z0, cfg.solver)
        except LinearSolveError as exc:
            walls.append(time.perf_counter() - t0)
            if exc.report is not None:
                reports.append(exc.report)
            failed = k
            break
        walls.append(time.perf_counter() - t0)
        reports.append(report)
        z_prev = report.z_final
        u = np.array(report.z_final[:prob.dims.m], dtype=float, copy=True)
        nxt = np.atleast_1d(np.asarray(plant.dynamics(x, u, k), dtype=float))
        if nxt.shape != (plant.dims.n,) or not np.all(np.isfinite(nxt)):
            raise NumericalBlowupError(k, "plant dynamics")
        controls.append(u)
        states.append(nxt)
        x = nxt

    return MpcTrace(
        applied_states=np.asarray(states),
        applied_controls=(np.asarray(controls) if controls
                          else np.empty((0, plant.dims.m))),
        per_step_reports=reports,
        per_step_wall_time=np.asarray(walls),
        failed_step=failed,
    )
