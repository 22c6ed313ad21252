"""Scripted nominal planners driven through the safety filter.

The pure-pursuit planner tracks a reference path; the adversarial planner
deliberately steers at a road boundary to exercise the filter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constraints import FilterParams
from .geometry import PolylineBoundary, closest_point_on_polyline
from .vehicle import ControlAction, VehicleParams, VehicleState, wrap_angle

# Steering target never asks for more than this.
_MAX_TARGET_STEER = 0.45 * math.pi
_DEFAULT_STEER_GAIN = 10.0
_DEFAULT_SPEED_GAIN = 4.0


def _clamp_action(accel, steer_rate, limits: FilterParams) -> ControlAction:
    accel = float(np.clip(accel, limits.u_min[0], limits.u_max[0]))
    steer_rate = float(np.clip(steer_rate, limits.u_min[1], limits.u_max[1]))
    return ControlAction(accel, steer_rate)


def _arc_lengths(path: np.ndarray) -> np.ndarray:
    steps = np.hypot(*(path[1:] - path[:-1]).T)
    return np.concatenate([[0.0], np.cumsum(steps)])


def _point_at_arclength(path: np.ndarray, cum: np.ndarray, s: float) -> np.ndarray:
    total = cum[-1]
    s = min(max(s, 0.0), total)
    k = int(np.searchsorted(cum, s, side="right")) - 1
    k = min(k, len(path) - 2)
    seg = cum[k + 1] - cum[k]
    t = 0.0 if seg <= 0 else (s - cum[k]) / seg
    return path[k] + t * (path[k + 1] - path[k])


def _pursuit_steer(
    state: VehicleState, target, params: VehicleParams, min_dist: float = 1e-6
) -> float:
    """Steering angle aiming the bicycle at a target point.

    ``min_dist`` floors the pursuit distance, capping the curvature demand
    when the target is very close.
    """
    dx = float(target[0] - state.x)
    dy = float(target[1] - state.y)
    dist = math.hypot(dx, dy)
    alpha = wrap_angle(math.atan2(dy, dx) - state.psi)
    desired = math.atan2(2.0 * params.wheelbase * math.sin(alpha), max(dist, min_dist))
    return float(np.clip(desired, -_MAX_TARGET_STEER, _MAX_TARGET_STEER))


def pure_pursuit_planner(
    state: VehicleState,
    path,
    lookahead: float,
    speed_ref: float,
    params: VehicleParams,
    limits: FilterParams | None = None,
    steer_gain: float = _DEFAULT_STEER_GAIN,
    speed_gain: float = _DEFAULT_SPEED_GAIN,
) -> ControlAction:
    """Steer toward the path point one lookahead ahead, track a speed.

    Steering rate is proportional to the error between the current steering
    angle and the pure-pursuit target angle; acceleration is proportional to
    the speed error. Both are clamped to the input bounds.
    """
    path = np.asarray(path, dtype=float)
    limits = limits or FilterParams()
    cum = _arc_lengths(path)
    _, _, seg, t = closest_point_on_polyline(state.position, path)
    s = cum[seg] + t * (cum[seg + 1] - cum[seg])
    closed = np.hypot(*(path[0] - path[-1])) < 1e-9
    s_target = s + lookahead
    if closed and cum[-1] > 0:
        s_target = s_target % cum[-1]
    target = _point_at_arclength(path, cum, s_target)

    steer_target = _pursuit_steer(state, target, params)
    steer_rate = steer_gain * (steer_target - state.delta)
    accel = speed_gain * (speed_ref - state.v)
    return _clamp_action(accel, steer_rate, limits)


def adversarial_planner(
    state: VehicleState,
    target_boundary: PolylineBoundary,
    gain: float,
    params: VehicleParams,
    speed_ref: float = 0.35,
    limits: FilterParams | None = None,
    speed_gain: float = _DEFAULT_SPEED_GAIN,
) -> ControlAction:
    """Steer at the nearest point of the target boundary at a set speed.

    Steering commands fade out near standstill, where swinging the wheels
    cannot move the vehicle anyway; unfiltered runs never slow down, so the
    planner stays just as dangerous there.
    """
    limits = limits or FilterParams()
    _, closest, _, _ = closest_point_on_polyline(
        state.position, target_boundary.points
    )
    steer_target = _pursuit_steer(state, closest, params, min_dist=0.25)
    authority = min(abs(state.v) / 0.15, 1.0)
    steer_rate = gain * authority * (steer_target - state.delta)
    accel = speed_gain * (speed_ref - state.v)
    return _clamp_action(accel, steer_rate, limits)


@dataclass
class PlannerConfig:
    """Which nominal planner to run and with what knobs."""

    kind: str = "pure_pursuit"  # "pure_pursuit" or "adversarial"
    lookahead: float = 0.12
    speed_ref: float = 0.3
    noise_std: float = 0.0  # steering-rate noise, rad/s
    gain: float = 3.0  # adversarial steering gain
    target_side: str = "left"  # adversarial target boundary

    def __post_init__(self):
        if self.kind not in ("pure_pursuit", "adversarial"):
            raise ValueError(f"unknown planner kind {self.kind!r}")
        if self.target_side not in ("left", "right"):
            raise ValueError(f"unknown target side {self.target_side!r}")


class Planner:
    """Stateful wrapper binding a planner config to a scenario and RNG.

    The RNG only feeds the optional steering-rate noise, so runs stay
    deterministic for a fixed seed.
    """

    def __init__(
        self,
        config: PlannerConfig,
        path: np.ndarray,
        left: PolylineBoundary,
        right: PolylineBoundary,
        params: VehicleParams,
        limits: FilterParams,
        rng: np.random.Generator,
    ):
        self.config = config
        self.path = np.asarray(path, dtype=float)
        self.left = left
        self.right = right
        self.params = params
        self.limits = limits
        self.rng = rng

    def __call__(self, state: VehicleState) -> ControlAction:
        cfg = self.config
        if cfg.kind == "pure_pursuit":
            action = pure_pursuit_planner(
                state,
                self.path,
                cfg.lookahead,
                cfg.speed_ref,
                self.params,
                self.limits,
            )
        else:
            boundary = self.left if cfg.target_side == "left" else self.right
            action = adversarial_planner(
                state,
                boundary,
                cfg.gain,
                self.params,
                speed_ref=cfg.speed_ref,
                limits=self.limits,
            )
        if cfg.noise_std > 0.0:
            noisy = action.steer_rate + self.rng.normal(0.0, cfg.noise_std)
            action = _clamp_action(action.accel, noisy, self.limits)
        return action
