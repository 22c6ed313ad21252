"""Procedural test maps: two-lane corridors with complex boundary shapes.

Each generator lays out a centerline from straights and constant-curvature
bends, then offsets it into left/right boundaries and per-lane reference
paths. Kinds: loop (closed circuit), interchange (ramp with a 270-degree
turn), intersection (90-degree urban corner), scurve (alternating bends).
"""

from __future__ import annotations

import math

import numpy as np

from .constraints import FilterParams
from .geometry import InteriorSide, PolylineBoundary, default_tangents
from .planners import PlannerConfig
from .simulation import Scenario, ScenarioConfig
from .vehicle import VehicleParams

MAP_KINDS = ("loop", "interchange", "intersection", "scurve")

DEFAULT_LANE_WIDTH = 0.15
DEFAULT_LANES = 2
_SAMPLE_STEP = 0.05


def _trace(ops, start, heading, step=_SAMPLE_STEP) -> np.ndarray:
    """Sample a centerline from ("straight", length) / ("bend", length, sweep)."""
    pts = [np.asarray(start, dtype=float)]
    h = float(heading)
    for op in ops:
        if op[0] == "straight":
            length = op[1]
            n = max(1, math.ceil(length / step))
            d = np.array([math.cos(h), math.sin(h)]) * (length / n)
            for _ in range(n):
                pts.append(pts[-1] + d)
        elif op[0] == "bend":
            length, sweep = op[1], op[2]
            if abs(sweep) < 1e-12:
                pts_op = [("straight", length)]
                sub = _trace(pts_op, pts[-1], h, step)
                pts.extend(sub[1:])
                continue
            radius = length / abs(sweep)
            n = max(2, math.ceil(length / step))
            dth = sweep / n
            chord = 2.0 * radius * math.sin(abs(dth) / 2.0)
            for _ in range(n):
                mid = h + dth / 2.0
                pts.append(pts[-1] + chord * np.array([math.cos(mid), math.sin(mid)]))
                h += dth
        else:
            raise ValueError(f"unknown op {op[0]!r}")
    return np.asarray(pts)


def _offset(center: np.ndarray, offset: float) -> np.ndarray:
    """Offset a polyline along its left normal (positive = left of travel)."""
    tans = default_tangents(center)
    normals = np.stack([-tans[:, 1], tans[:, 0]], axis=1)
    return center + offset * normals


def _close(points: np.ndarray) -> np.ndarray:
    """Snap the final point of a nearly-closed polyline onto the first."""
    out = points.copy()
    out[-1] = out[0]
    return out


def _check_self_clearance(
    center: np.ndarray, corridor: float, closed: bool, kind: str
) -> None:
    """Reject centerlines whose distant sections approach each other.

    If two sections separated along the path come closer than the corridor
    width plus a margin, the offset boundaries would overlap and the signed
    distance field would pick far segments with the wrong side.
    """
    steps = np.hypot(*(center[1:] - center[:-1]).T)
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    total = cum[-1]
    window = 2.0 * corridor
    required = corridor + 0.15
    diff = center[:, None, :] - center[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    arc = np.abs(cum[:, None] - cum[None, :])
    if closed:
        arc = np.minimum(arc, total - arc)
    bad = (arc > window) & (dist < required)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise ValueError(
            f"{kind} centerline self-approach: points {i} and {j} are "
            f"{dist[i, j]:.3f} m apart across {arc[i, j]:.3f} m of path"
        )


def _centerline(kind: str, rng: np.random.Generator, curvature: float) -> tuple[np.ndarray, bool]:
    # Bend radii stay well above the corridor width so the distance field's
    # focal set (center of curvature of concave boundary sections) lies
    # outside the drivable strip; inside it the Hessian would blow up.
    heading = float(rng.uniform(0.0, 2.0 * math.pi))
    if kind == "loop":
        straight = float(rng.uniform(1.0, 1.5))
        radius = float(rng.uniform(0.6, 0.75))
        ops = [
            ("straight", straight),
            ("bend", math.pi * radius, math.pi),
            ("straight", straight),
            ("bend", math.pi * radius, math.pi),
        ]
        return _close(_trace(ops, (0.0, 0.0), heading)), True
    if kind == "interchange":
        # Ramp wrapping through two same-direction bends with a spacer
        # between, like a directional interchange ramp. The spacer keeps the
        # exit leg clear of the approach leg.
        side = float(rng.choice([-1.0, 1.0]))
        radius = float(rng.uniform(0.6, 0.7))
        sweep1 = side * float(rng.uniform(1.7, 2.1))
        sweep2 = side * float(rng.uniform(1.7, 2.1))
        ops = [
            ("straight", float(rng.uniform(0.4, 0.6))),
            ("bend", radius * abs(sweep1), sweep1),
            ("straight", float(rng.uniform(0.8, 1.0))),
            ("bend", radius * abs(sweep2), sweep2),
            ("straight", float(rng.uniform(0.4, 0.6))),
        ]
        return _trace(ops, (0.0, 0.0), heading), False
    if kind == "intersection":
        radius = float(rng.uniform(0.6, 0.75))
        turn = 0.5 * math.pi * float(rng.choice([-1.0, 1.0]))
        ops = [
            ("straight", float(rng.uniform(0.5, 0.8))),
            ("bend", radius * abs(turn), turn),
            ("straight", float(rng.uniform(0.5, 0.8))),
        ]
        return _trace(ops, (0.0, 0.0), heading), False
    if kind == "scurve":
        ops = [("straight", 0.4)]
        sign = float(rng.choice([-1.0, 1.0]))
        for _ in range(3):
            radius = float(rng.uniform(0.6, 0.85))
            sweep = sign * float(rng.uniform(0.9, 1.4)) * curvature
            ops.append(("bend", radius * max(abs(sweep), 0.3), sweep))
            ops.append(("straight", float(rng.uniform(0.15, 0.3))))
            sign = -sign
        ops.append(("straight", 0.4))
        return _trace(ops, (0.0, 0.0), heading), False
    raise ValueError(f"unknown map kind {kind!r}; expected one of {MAP_KINDS}")


def generate_config(
    kind: str,
    seed: int = 0,
    lane_width: float = DEFAULT_LANE_WIDTH,
    lanes: int = DEFAULT_LANES,
    curvature: float = 1.0,
    name: str | None = None,
) -> ScenarioConfig:
    """Build a ready-to-run scenario for the given map kind and seed."""
    rng = np.random.default_rng(seed)
    center, closed = _centerline(kind, rng, curvature)
    half_width = lanes * lane_width / 2.0
    _check_self_clearance(center, 2.0 * half_width, closed, kind)

    left_pts = _offset(center, +half_width)
    right_pts = _offset(center, -half_width)
    if closed:
        left_pts = _close(left_pts)
        right_pts = _close(right_pts)
    left = PolylineBoundary(left_pts, InteriorSide.RIGHT_OF_TRAVEL)
    right = PolylineBoundary(right_pts, InteriorSide.LEFT_OF_TRAVEL)

    lane_offsets = [(i - (lanes - 1) / 2.0) * lane_width for i in range(lanes)]
    paths = []
    for off in lane_offsets:
        path = _offset(center, off)
        paths.append(_close(path) if closed else path)

    scenario = Scenario(
        left=left,
        right=right,
        reference_paths=paths,
        spawn_speed_range=(0.0, 0.5),
        duration_steps=600,
    )
    return ScenarioConfig(
        scenario=scenario,
        vehicle=VehicleParams(),
        filter_params=FilterParams(),
        planner=PlannerConfig(),
        name=name or f"{kind}-{seed}",
    )


def generate_map(
    kind: str,
    seed: int = 0,
    lane_width: float = DEFAULT_LANE_WIDTH,
    lanes: int = DEFAULT_LANES,
    curvature: float = 1.0,
    name: str | None = None,
) -> dict:
    """Generate a map and return it as a normalized scenario document."""
    from .scenario_io import scenario_to_document

    config = generate_config(
        kind, seed, lane_width=lane_width, lanes=lanes, curvature=curvature, name=name
    )
    return scenario_to_document(config)
