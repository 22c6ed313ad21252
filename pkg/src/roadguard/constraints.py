"""Barrier constraint rows linear in the control input.

For each cover circle and each boundary, the barrier value is the signed
pseudo-distance of the circle center minus the circle radius. Enforcing

    dt * hdot + 0.5 * dt^2 * hddot(u) + alpha1 * h >= gamma_term

with hdot = grad . cdot and hddot(u) = grad . cddot(u) + cdot^T H cdot
yields one affine inequality a . u >= b per (circle, boundary) pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geometry import PolylineBoundary, polyline_pseudo_distance
from .vehicle import CircleKinematics, VehicleParams, VehicleState, circle_kinematics


class NonFiniteField(RuntimeError):
    """Distance field returned non-finite derivatives."""


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


def _default_bound(value: float):
    return field(default_factory=lambda: np.array([value, value]))


@dataclass
class FilterParams:
    """Sampling period, class-K slope, residual term, input bounds, weights."""

    dt: float = 0.05
    alpha1: float = 0.1
    gamma_term: float = 0.0  # right-hand residual, ~0 for small dt
    u_min: np.ndarray = _default_bound(-40.0)
    u_max: np.ndarray = _default_bound(40.0)
    weights: np.ndarray = field(default_factory=lambda: np.array([30.0, 1.0]))

    def __post_init__(self):
        self.u_min = np.asarray(self.u_min, dtype=float).reshape(2)
        self.u_max = np.asarray(self.u_max, dtype=float).reshape(2)
        self.weights = np.asarray(self.weights, dtype=float).reshape(2)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.alpha1 <= 0:
            raise ValueError("alpha1 must be positive")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if np.any(self.u_min >= self.u_max):
            raise ValueError("u_min must be below u_max componentwise")

    @property
    def weight_matrix(self) -> np.ndarray:
        return np.diag(self.weights)


@dataclass
class CbfConstraintRow:
    """Affine inequality a . u >= b with diagnostics."""

    a: np.ndarray
    b: float
    h: float
    h_dot: float
    circle_index: int
    side: Side


def evaluate_h(
    kin: CircleKinematics, radius: float, boundary: PolylineBoundary
) -> tuple[float, np.ndarray, np.ndarray]:
    """Barrier value, gradient, and Hessian at a circle center.

    h is the signed pseudo-distance of the center minus the circle radius;
    the radius is constant, so the derivatives are those of the field.
    """
    ev = polyline_pseudo_distance(kin.center, boundary)
    return ev.value - radius, ev.gradient, ev.hessian


def _row_from_kinematics(
    kin: CircleKinematics,
    radius: float,
    filter_params: FilterParams,
    boundary: PolylineBoundary,
    index: int,
    side: Side,
) -> CbfConstraintRow:
    h, grad, hess = evaluate_h(kin, radius, boundary)
    if not (
        np.isfinite(h) and np.all(np.isfinite(grad)) and np.all(np.isfinite(hess))
    ):
        raise NonFiniteField(f"non-finite field at circle {index} ({side.value})")
    dt = filter_params.dt
    h_dot = float(grad @ kin.velocity)
    drift = float(grad @ kin.accel_const + kin.velocity @ hess @ kin.velocity)
    a = 0.5 * dt * dt * (kin.accel_input_map.T @ grad)
    b = (
        filter_params.gamma_term
        - dt * h_dot
        - 0.5 * dt * dt * drift
        - filter_params.alpha1 * h
    )
    return CbfConstraintRow(
        a=a, b=float(b), h=h, h_dot=h_dot, circle_index=index, side=side
    )


def build_row(
    state: VehicleState,
    params: VehicleParams,
    filter_params: FilterParams,
    index: int,
    boundary: PolylineBoundary,
    side: Side,
) -> CbfConstraintRow:
    """Constraint row for one circle against one boundary."""
    kin = circle_kinematics(state, params, index)
    return _row_from_kinematics(
        kin, params.circle_radius, filter_params, boundary, index, side
    )


def build_all_rows(
    state: VehicleState,
    params: VehicleParams,
    filter_params: FilterParams,
    left: PolylineBoundary,
    right: PolylineBoundary,
) -> list[CbfConstraintRow]:
    """All 2 * n_circles rows, ordered by circle index, left before right."""
    rows = []
    radius = params.circle_radius
    for index in range(params.n_circles):
        kin = circle_kinematics(state, params, index)
        rows.append(
            _row_from_kinematics(kin, radius, filter_params, left, index, Side.LEFT)
        )
        rows.append(
            _row_from_kinematics(kin, radius, filter_params, right, index, Side.RIGHT)
        )
    return rows
