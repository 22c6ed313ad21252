"""Per-step safety certification of a nominal control action."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .constraints import CbfConstraintRow, FilterParams, build_all_rows
from .geometry import PolylineBoundary
from .qp import QpProblem, QpStatus, solve
from .vehicle import ControlAction, VehicleParams, VehicleState

logger = logging.getLogger(__name__)

# Deviations above this infinity norm count as an active intervention.
ACTIVITY_TOL = 1e-9


@dataclass
class FilterOutcome:
    """Certified action plus diagnostics for one step.

    was_active means the certified action deviates from the nominal one;
    infeasible means the QP had no solution and the braking fallback was
    applied. Times are wall-clock seconds for constraint assembly (dominated
    by distance-field evaluation) and for the QP solve.
    """

    u_certified: ControlAction
    was_active: bool
    infeasible: bool
    rows: list[CbfConstraintRow]
    solve_time: float
    distance_time: float


def certify(
    state: VehicleState,
    u_nom: ControlAction,
    params: VehicleParams,
    filter_params: FilterParams,
    left: PolylineBoundary,
    right: PolylineBoundary,
) -> FilterOutcome:
    """Minimally adjust ``u_nom`` so every barrier constraint holds.

    When the QP is infeasible the fallback is maximal braking with zero
    steering rate, clamped to the input bounds, and the outcome is flagged.
    """
    t0 = perf_counter()
    rows = build_all_rows(state, params, filter_params, left, right)
    distance_time = perf_counter() - t0

    if all(abs(row.a[1]) < 1e-12 for row in rows):
        logger.debug(
            "steering-rate column vanished in all rows (v=%.3g, psi_dot~0)", state.v
        )

    problem = QpProblem(
        u_nom=u_nom.as_array(),
        weights=filter_params.weight_matrix,
        rows=rows,
        u_min=filter_params.u_min,
        u_max=filter_params.u_max,
    )
    t1 = perf_counter()
    solution = solve(problem)
    solve_time = perf_counter() - t1

    if solution.status is QpStatus.INFEASIBLE:
        # Emergency braking: shed speed as fast as the bounds allow, but do
        # not push through zero into reverse; steering rate held at zero.
        braking = -state.v / filter_params.dt
        fallback = np.clip(
            np.array([braking, 0.0]), filter_params.u_min, filter_params.u_max
        )
        u_certified = ControlAction(float(fallback[0]), float(fallback[1]))
        infeasible = True
    else:
        u_certified = ControlAction(float(solution.u[0]), float(solution.u[1]))
        infeasible = False

    deviation = max(
        abs(u_certified.accel - u_nom.accel),
        abs(u_certified.steer_rate - u_nom.steer_rate),
    )
    return FilterOutcome(
        u_certified=u_certified,
        was_active=deviation > ACTIVITY_TOL,
        infeasible=infeasible,
        rows=rows,
        solve_time=solve_time,
        distance_time=distance_time,
    )
