"""Kinematic bicycle model and the circle cover of its rectangular footprint.

State is [x, y, psi, v, delta] with acceleration and steering rate as inputs.
The footprint is overapproximated by identical circles spaced along the
longitudinal axis; each circle's world-frame center, velocity, and
acceleration (split into an input-independent part and a linear map of the
input) feed the barrier constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Steering clamp applied by the simulator so tan(delta) stays finite.
MAX_STEERING_ANGLE = 0.47 * math.pi


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass
class VehicleParams:
    """Rectangular footprint, axle geometry, and circle-cover resolution."""

    length: float = 0.16
    width: float = 0.08
    wheelbase: float = 0.16
    rear_wheelbase: float = 0.08
    n_circles: int = 3

    def __post_init__(self):
        if min(self.length, self.width, self.wheelbase, self.rear_wheelbase) <= 0:
            raise ValueError("vehicle dimensions must be positive")
        if self.n_circles < 1:
            raise ValueError("need at least one cover circle")

    @property
    def circle_radius(self) -> float:
        """Minimum radius covering the rectangle with n equidistant circles."""
        return math.hypot(self.length / (2 * self.n_circles), self.width / 2)

    @property
    def circle_spacing(self) -> float:
        return self.length / self.n_circles


@dataclass
class VehicleState:
    """Pose, speed, and steering angle; heading is wrapped to (-pi, pi]."""

    x: float
    y: float
    psi: float
    v: float
    delta: float

    def __post_init__(self):
        self.psi = wrap_angle(self.psi)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.psi, self.v, self.delta])

    @classmethod
    def from_array(cls, arr) -> "VehicleState":
        x, y, psi, v, delta = (float(c) for c in arr)
        return cls(x=x, y=y, psi=psi, v=v, delta=delta)

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass
class ControlAction:
    """Acceleration (m/s^2) and steering rate (rad/s)."""

    accel: float
    steer_rate: float

    def __post_init__(self):
        if not (math.isfinite(self.accel) and math.isfinite(self.steer_rate)):
            raise ValueError("control action must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.accel, self.steer_rate])


def slip_angle(delta: float, params: VehicleParams) -> float:
    """Slip angle beta = atan((l_r / l_wb) * tan(delta))."""
    return math.atan(params.rear_wheelbase / params.wheelbase * math.tan(delta))


def _slip_angle_rate(delta: float, params: VehicleParams) -> float:
    """d beta / d delta."""
    k = params.rear_wheelbase / params.wheelbase
    sec2 = 1.0 / math.cos(delta) ** 2
    return k * sec2 / (1.0 + (k * math.tan(delta)) ** 2)


def dynamics(state: VehicleState, action: ControlAction, params: VehicleParams) -> np.ndarray:
    """Time derivative [xdot, ydot, psidot, vdot, deltadot]."""
    beta = slip_angle(state.delta, params)
    heading = state.psi + beta
    return np.array(
        [
            state.v * math.cos(heading),
            state.v * math.sin(heading),
            state.v / params.wheelbase * math.tan(state.delta) * math.cos(beta),
            action.accel,
            action.steer_rate,
        ]
    )


def circle_layout(params: VehicleParams) -> np.ndarray:
    """Body-frame circle centers, shape (n_circles, 2).

    Centers sit on the longitudinal axis at (-1/2 + (2j - 1) / (2 n)) * length
    for j = 1..n, symmetric about the footprint center.
    """
    j = np.arange(1, params.n_circles + 1)
    cx = (-0.5 + (2 * j - 1) / (2 * params.n_circles)) * params.length
    return np.stack([cx, np.zeros_like(cx)], axis=1)


@dataclass
class CircleKinematics:
    """World-frame motion of one cover circle.

    The center acceleration is affine in the control input:
    accel(u) = accel_const + accel_input_map @ [accel, steer_rate].
    """

    center: np.ndarray
    velocity: np.ndarray
    accel_const: np.ndarray
    accel_input_map: np.ndarray

    def accel(self, action: ControlAction) -> np.ndarray:
        return self.accel_const + self.accel_input_map @ action.as_array()


def circle_kinematics(
    state: VehicleState, params: VehicleParams, index: int
) -> CircleKinematics:
    """Center position, velocity, and acceleration split for circle ``index``.

    ``index`` is 0-based. Derivation: the body-frame offset cx is constant,
    so differentiating c = R(psi) [cx, 0] + [x, y] twice gives terms in
    psidot, psiddot, xddot, yddot; each second derivative of the bicycle
    model is affine in the input, which carries over to the center.
    """
    if not 0 <= index < params.n_circles:
        raise IndexError(f"circle index {index} out of range")
    cx = float(circle_layout(params)[index, 0])

    beta = slip_angle(state.delta, params)
    beta_rate = _slip_angle_rate(state.delta, params)
    heading = state.psi + beta
    cos_h, sin_h = math.cos(heading), math.sin(heading)
    cos_p, sin_p = math.cos(state.psi), math.sin(state.psi)
    cos_b, sin_b = math.cos(beta), math.sin(beta)
    tan_d = math.tan(state.delta)
    sec2_d = 1.0 / math.cos(state.delta) ** 2
    wb = params.wheelbase
    v = state.v

    x_dot = v * cos_h
    y_dot = v * sin_h
    psi_dot = v / wb * tan_d * cos_b

    center = np.array([state.x + cos_p * cx, state.y + sin_p * cx])
    velocity = np.array([x_dot - sin_p * psi_dot * cx, y_dot + cos_p * psi_dot * cx])

    # xddot = u_a cos(h) - v sin(h) (psidot + beta' u_s), similarly for yddot;
    # psiddot = u_a tan(d) cos(b) / wb + v (sec^2(d) cos(b) - tan(d) sin(b) beta') u_s / wb.
    xdd_const = -v * sin_h * psi_dot
    ydd_const = v * cos_h * psi_dot
    xdd_ua, xdd_us = cos_h, -v * sin_h * beta_rate
    ydd_ua, ydd_us = sin_h, v * cos_h * beta_rate
    psidd_ua = tan_d * cos_b / wb
    psidd_us = v / wb * (sec2_d * cos_b - tan_d * sin_b * beta_rate)

    accel_const = np.array(
        [
            -cos_p * psi_dot**2 * cx + xdd_const,
            -sin_p * psi_dot**2 * cx + ydd_const,
        ]
    )
    accel_input_map = np.array(
        [
            [xdd_ua - sin_p * cx * psidd_ua, xdd_us - sin_p * cx * psidd_us],
            [ydd_ua + cos_p * cx * psidd_ua, ydd_us + cos_p * cx * psidd_us],
        ]
    )
    return CircleKinematics(
        center=center,
        velocity=velocity,
        accel_const=accel_const,
        accel_input_map=accel_input_map,
    )


def world_circle_centers(state: VehicleState, params: VehicleParams) -> np.ndarray:
    """All circle centers in the world frame, shape (n_circles, 2)."""
    offsets = circle_layout(params)
    cos_p, sin_p = math.cos(state.psi), math.sin(state.psi)
    rot = np.array([[cos_p, -sin_p], [sin_p, cos_p]])
    return offsets @ rot.T + state.position


def footprint_corners(state: VehicleState, params: VehicleParams) -> np.ndarray:
    """World-frame corners of the rectangular footprint, shape (4, 2)."""
    hx, hy = params.length / 2, params.width / 2
    local = np.array([[hx, hy], [-hx, hy], [-hx, -hy], [hx, -hy]])
    cos_p, sin_p = math.cos(state.psi), math.sin(state.psi)
    rot = np.array([[cos_p, -sin_p], [sin_p, cos_p]])
    return local @ rot.T + state.position
