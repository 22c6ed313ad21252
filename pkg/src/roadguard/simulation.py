"""Closed-loop simulator: fixed-step integration, ground-truth collision
checking, spawn/reset rules, and per-step trace records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constraints import FilterParams
from .filter import FilterOutcome, certify
from .geometry import PolylineBoundary, closest_point_on_polyline, signed_distance_batch
from .planners import Planner, PlannerConfig
from .vehicle import (
    MAX_STEERING_ANGLE,
    ControlAction,
    VehicleParams,
    VehicleState,
    footprint_corners,
    wrap_angle,
    world_circle_centers,
)

# Spawn states must clear every barrier by at least this margin (m).
SPAWN_MARGIN = 0.01
_SPAWN_ATTEMPTS = 200
# Respawn when progress gets this close to an open path's end (m).
_COMPLETION_MARGIN = 0.25
# Respawn when the vehicle strays this far from its reference path (m).
_STRAY_LIMIT = 0.5


class ConfigError(ValueError):
    """Scenario configuration cannot produce a valid run."""


@dataclass
class Scenario:
    """Road geometry plus spawn rules for closed-loop runs."""

    left: PolylineBoundary
    right: PolylineBoundary
    reference_paths: list[np.ndarray]
    spawn_speed_range: tuple[float, float] = (0.0, 0.5)
    duration_steps: int = 600

    def __post_init__(self):
        if not self.reference_paths:
            raise ConfigError("scenario needs at least one reference path")
        if self.duration_steps < 0:
            raise ConfigError("duration must be nonnegative")
        lo, hi = self.spawn_speed_range
        if lo < 0 or hi < lo:
            raise ConfigError("invalid spawn speed range")


@dataclass
class ScenarioConfig:
    """Everything a run needs: map, vehicle, filter, planner, name."""

    scenario: Scenario
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    filter_params: FilterParams = field(default_factory=FilterParams)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    name: str = "scenario"


@dataclass
class StepRecord:
    """One simulation step.

    ``state`` is the state the planner and filter saw; ``min_h`` and
    ``collided`` are evaluated on the state that results from applying the
    certified action.
    """

    step: int
    state: VehicleState
    u_nom: ControlAction
    outcome: FilterOutcome
    min_h: float
    collided: bool


@dataclass
class RunSummary:
    steps: int
    collisions: int
    resets: int
    activity_rate: float
    infeasible_steps: int
    min_h: float
    median_solve_time: float
    median_distance_time: float
    p90_solve_time: float
    p90_distance_time: float
    planner: str
    filter_on: bool
    seed: int


def step(
    state: VehicleState, action: ControlAction, dt: float, params: VehicleParams
) -> VehicleState:
    """One RK4 step of the bicycle dynamics under a zero-order-hold input.

    Heading is wrapped afterwards and the steering angle clamped so that
    tan(delta) stays finite.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    k = params.rear_wheelbase / params.wheelbase
    ua, us = action.accel, action.steer_rate
    wb = params.wheelbase

    def f(y):
        beta = math.atan(k * math.tan(y[4]))
        heading = y[2] + beta
        return np.array(
            [
                y[3] * math.cos(heading),
                y[3] * math.sin(heading),
                y[3] / wb * math.tan(y[4]) * math.cos(beta),
                ua,
                us,
            ]
        )

    y = state.as_array()
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return VehicleState(
        x=float(y[0]),
        y=float(y[1]),
        psi=wrap_angle(float(y[2])),
        v=float(y[3]),
        delta=float(np.clip(y[4], -MAX_STEERING_ANGLE, MAX_STEERING_ANGLE)),
    )


def _rectangle_hits_polyline(
    state: VehicleState, params: VehicleParams, points: np.ndarray
) -> bool:
    """Exact oriented-rectangle vs polyline intersection (touching counts)."""
    cos_p, sin_p = math.cos(state.psi), math.sin(state.psi)
    rot = np.array([[cos_p, sin_p], [-sin_p, cos_p]])  # world -> body
    q = (points - state.position) @ rot.T
    hx, hy = params.length / 2, params.width / 2
    q1, q2 = q[:-1], q[1:]

    inside1 = (np.abs(q1[:, 0]) <= hx) & (np.abs(q1[:, 1]) <= hy)
    inside2 = (np.abs(q2[:, 0]) <= hx) & (np.abs(q2[:, 1]) <= hy)
    # Separating-axis test on the box axes and the segment normal.
    sep_x = (np.maximum(q1[:, 0], q2[:, 0]) < -hx) | (
        np.minimum(q1[:, 0], q2[:, 0]) > hx
    )
    sep_y = (np.maximum(q1[:, 1], q2[:, 1]) < -hy) | (
        np.minimum(q1[:, 1], q2[:, 1]) > hy
    )
    d = q2 - q1
    n0, n1 = -d[:, 1], d[:, 0]
    reach = hx * np.abs(n0) + hy * np.abs(n1)
    line_dist = np.abs(n0 * q1[:, 0] + n1 * q1[:, 1])
    sep_n = line_dist > reach
    overlap = ~(sep_x | sep_y | sep_n)
    return bool(np.any(inside1 | inside2 | overlap))


def collision_check(
    state: VehicleState,
    params: VehicleParams,
    left: PolylineBoundary,
    right: PolylineBoundary,
) -> bool:
    """Ground truth on the rectangular footprint, not the cover circles."""
    return _rectangle_hits_polyline(state, params, left.points) or (
        _rectangle_hits_polyline(state, params, right.points)
    )


def min_barrier_value(
    state: VehicleState,
    params: VehicleParams,
    left: PolylineBoundary,
    right: PolylineBoundary,
) -> float:
    """Minimum over circles and boundaries of the barrier value h."""
    centers = world_circle_centers(state, params)
    lowest = min(
        float(np.min(signed_distance_batch(centers, left))),
        float(np.min(signed_distance_batch(centers, right))),
    )
    return lowest - params.circle_radius


def _passthrough_outcome(u_nom: ControlAction) -> FilterOutcome:
    return FilterOutcome(
        u_certified=u_nom,
        was_active=False,
        infeasible=False,
        rows=[],
        solve_time=0.0,
        distance_time=0.0,
    )


def _spawn(
    config: ScenarioConfig, rng: np.random.Generator
) -> tuple[VehicleState, int]:
    """Random state on a reference path with clearance, plus the path index."""
    sc = config.scenario
    lo, hi = sc.spawn_speed_range
    for _ in range(_SPAWN_ATTEMPTS):
        path_idx = int(rng.integers(len(sc.reference_paths)))
        path = sc.reference_paths[path_idx]
        steps = np.hypot(*(path[1:] - path[:-1]).T)
        cum = np.concatenate([[0.0], np.cumsum(steps)])
        closed = np.hypot(*(path[0] - path[-1])) < 1e-9
        frac_hi = 1.0 if closed else 0.85
        s = float(rng.uniform(0.0, frac_hi * cum[-1]))
        k = min(int(np.searchsorted(cum, s, side="right")) - 1, len(path) - 2)
        seg = cum[k + 1] - cum[k]
        t = 0.0 if seg <= 0 else (s - cum[k]) / seg
        pos = path[k] + t * (path[k + 1] - path[k])
        tangent = path[k + 1] - path[k]
        state = VehicleState(
            x=float(pos[0]),
            y=float(pos[1]),
            psi=math.atan2(float(tangent[1]), float(tangent[0])),
            v=float(rng.uniform(lo, hi)),
            delta=0.0,
        )
        clear = min_barrier_value(state, config.vehicle, sc.left, sc.right)
        if clear >= SPAWN_MARGIN and not collision_check(
            state, config.vehicle, sc.left, sc.right
        ):
            return state, path_idx
    raise ConfigError("could not find a safe spawn state")


def _needs_reset(state: VehicleState, path: np.ndarray) -> bool:
    dist, _, seg, t = closest_point_on_polyline(state.position, path)
    if dist > _STRAY_LIMIT:
        return True
    closed = np.hypot(*(path[0] - path[-1])) < 1e-9
    if closed:
        return False
    steps = np.hypot(*(path[1:] - path[:-1]).T)
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    s = cum[seg] + t * steps[seg]
    return s >= cum[-1] - _COMPLETION_MARGIN


def run_scenario(
    config: ScenarioConfig,
    filter_on: bool = True,
    seed: int = 0,
    planner: PlannerConfig | None = None,
    duration_steps: int | None = None,
) -> tuple[list[StepRecord], RunSummary]:
    """Deterministic closed-loop run.

    On collision or path completion the vehicle respawns at a fresh random
    reference-path point. Records are bit-identical across runs with the
    same inputs, except for the wall-clock timing fields.
    """
    sc = config.scenario
    planner_cfg = planner or config.planner
    steps_total = sc.duration_steps if duration_steps is None else duration_steps
    rng = np.random.default_rng(seed)

    state, path_idx = _spawn(config, rng)

    def make_planner(idx: int) -> Planner:
        return Planner(
            planner_cfg,
            sc.reference_paths[idx],
            sc.left,
            sc.right,
            config.vehicle,
            config.filter_params,
            rng,
        )

    active_planner = make_planner(path_idx)
    records: list[StepRecord] = []
    collisions = 0
    resets = 0

    for k in range(steps_total):
        u_nom = active_planner(state)
        if filter_on:
            outcome = certify(
                state,
                u_nom,
                config.vehicle,
                config.filter_params,
                sc.left,
                sc.right,
            )
        else:
            outcome = _passthrough_outcome(u_nom)

        next_state = step(
            state, outcome.u_certified, config.filter_params.dt, config.vehicle
        )
        collided = collision_check(next_state, config.vehicle, sc.left, sc.right)
        min_h = min_barrier_value(next_state, config.vehicle, sc.left, sc.right)
        records.append(
            StepRecord(
                step=k,
                state=state,
                u_nom=u_nom,
                outcome=outcome,
                min_h=min_h,
                collided=collided,
            )
        )

        if collided:
            collisions += 1
        if collided or _needs_reset(next_state, sc.reference_paths[path_idx]):
            state, path_idx = _spawn(config, rng)
            active_planner = make_planner(path_idx)
            resets += 1
        else:
            state = next_state

    solve_times = [r.outcome.solve_time for r in records] or [0.0]
    dist_times = [r.outcome.distance_time for r in records] or [0.0]
    summary = RunSummary(
        steps=len(records),
        collisions=collisions,
        resets=resets,
        activity_rate=(
            sum(r.outcome.was_active for r in records) / len(records)
            if records
            else 0.0
        ),
        infeasible_steps=sum(r.outcome.infeasible for r in records),
        min_h=min((r.min_h for r in records), default=math.inf),
        median_solve_time=float(np.median(solve_times)),
        median_distance_time=float(np.median(dist_times)),
        p90_solve_time=float(np.percentile(solve_times, 90)),
        p90_distance_time=float(np.percentile(dist_times, 90)),
        planner=planner_cfg.kind,
        filter_on=filter_on,
        seed=seed,
    )
    return records, summary
