"""Scenario document schema: loading, validation, and normalization.

Scenarios are stored as JSON with explicit units (meters, radians, seconds).
Loading applies defaulting rules (chord tangents, standard vehicle/filter
parameters) and enforces every boundary and clearance invariant; saving a
loaded scenario reproduces the normalized document exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .constraints import FilterParams
from .geometry import GeometryError, InteriorSide, PolylineBoundary, signed_distance_batch
from .planners import PlannerConfig
from .simulation import ConfigError, Scenario, ScenarioConfig
from .vehicle import VehicleParams

SCHEMA_VERSION = 1

_UNITS = {"length": "m", "angle": "rad", "time": "s"}


class ParseError(ValueError):
    """Document is structurally malformed."""


class ValidationError(ValueError):
    """Document parses but breaks a scenario invariant."""


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise ParseError(f"{where}: missing key {key!r}")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ParseError(f"{where}: {key!r} must be a number")
        return float(value)
    if not isinstance(value, kind):
        raise ParseError(f"{where}: {key!r} must be {kind.__name__}")
    return value


def _point_list(raw, where: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: points must be numeric pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ParseError(f"{where}: points must be a list of [x, y] pairs")
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{where}: points must be finite")
    return arr


def _boundary_from_doc(doc, where: str) -> PolylineBoundary:
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: boundary must be an object")
    points = _point_list(_require(doc, "points", list, where), where)
    tangents = doc.get("tangents")
    if tangents is not None:
        tangents = _point_list(tangents, f"{where}.tangents")
        if len(tangents) != len(points):
            raise ValidationError(f"{where}: tangent count must match point count")
    side_raw = _require(doc, "interior_side", str, where)
    try:
        side = InteriorSide(side_raw)
    except ValueError as exc:
        raise ParseError(f"{where}: unknown interior_side {side_raw!r}") from exc
    try:
        return PolylineBoundary(points, side, tangents)
    except GeometryError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _boundary_to_doc(boundary: PolylineBoundary) -> dict:
    return {
        "points": boundary.points.tolist(),
        "tangents": boundary.tangents.tolist(),
        "interior_side": boundary.interior_side.value,
    }


def scenario_from_document(doc: dict) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a raw document.

    Raises ParseError for structural problems and ValidationError for
    invariant breaches (duplicate points, reference paths without clearance).
    """
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be an object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r}")

    left = _boundary_from_doc(doc.get("left_boundary"), "left_boundary")
    right = _boundary_from_doc(doc.get("right_boundary"), "right_boundary")

    raw_paths = _require(doc, "reference_paths", list, "scenario")
    if not raw_paths:
        raise ValidationError("scenario: needs at least one reference path")
    paths = [
        _point_list(p, f"reference_paths[{i}]") for i, p in enumerate(raw_paths)
    ]
    for i, p in enumerate(paths):
        if len(p) < 2:
            raise ValidationError(f"reference_paths[{i}]: needs at least 2 points")

    vdoc = doc.get("vehicle", {})
    if not isinstance(vdoc, dict):
        raise ParseError("vehicle must be an object")
    try:
        vehicle = VehicleParams(
            length=float(vdoc.get("length", 0.16)),
            width=float(vdoc.get("width", 0.08)),
            wheelbase=float(vdoc.get("wheelbase", 0.16)),
            rear_wheelbase=float(vdoc.get("rear_wheelbase", 0.08)),
            n_circles=int(vdoc.get("n_circles", 3)),
        )
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"vehicle: {exc}") from exc

    fdoc = doc.get("filter", {})
    if not isinstance(fdoc, dict):
        raise ParseError("filter must be an object")
    try:
        filter_params = FilterParams(
            dt=float(fdoc.get("dt", 0.05)),
            alpha1=float(fdoc.get("alpha1", 0.1)),
            gamma_term=float(fdoc.get("gamma_term", 0.0)),
            u_min=np.asarray(fdoc.get("u_min", [-40.0, -40.0]), dtype=float),
            u_max=np.asarray(fdoc.get("u_max", [40.0, 40.0]), dtype=float),
            weights=np.asarray(fdoc.get("weights", [30.0, 1.0]), dtype=float),
        )
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"filter: {exc}") from exc

    pdoc = doc.get("planner", {})
    if not isinstance(pdoc, dict):
        raise ParseError("planner must be an object")
    try:
        planner = PlannerConfig(
            kind=str(pdoc.get("kind", "pure_pursuit")),
            lookahead=float(pdoc.get("lookahead", 0.12)),
            speed_ref=float(pdoc.get("speed_ref", 0.35)),
            noise_std=float(pdoc.get("noise_std", 0.0)),
            gain=float(pdoc.get("gain", 8.0)),
            target_side=str(pdoc.get("target_side", "left")),
        )
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"planner: {exc}") from exc

    sdoc = doc.get("spawn", {})
    if not isinstance(sdoc, dict):
        raise ParseError("spawn must be an object")
    speed_range = sdoc.get("speed_range", [0.0, 0.5])
    if not isinstance(speed_range, (list, tuple)) or len(speed_range) != 2:
        raise ParseError("spawn.speed_range must be [low, high]")

    duration = doc.get("duration_steps", 600)
    if not isinstance(duration, int) or isinstance(duration, bool):
        raise ParseError("duration_steps must be an integer")

    # Reference paths must keep more than one circle radius of clearance.
    radius = vehicle.circle_radius
    for i, path in enumerate(paths):
        for boundary, label in ((left, "left"), (right, "right")):
            values = signed_distance_batch(path, boundary)
            worst = int(np.argmin(values))
            if values[worst] <= radius:
                raise ValidationError(
                    f"reference_paths[{i}] point {worst} has clearance "
                    f"{values[worst]:.4f} m <= circle radius {radius:.4f} m "
                    f"to the {label} boundary"
                )

    try:
        scenario = Scenario(
            left=left,
            right=right,
            reference_paths=paths,
            spawn_speed_range=(float(speed_range[0]), float(speed_range[1])),
            duration_steps=duration,
        )
    except ConfigError as exc:
        raise ValidationError(str(exc)) from exc

    name = doc.get("name", "scenario")
    if not isinstance(name, str):
        raise ParseError("name must be a string")
    return ScenarioConfig(
        scenario=scenario,
        vehicle=vehicle,
        filter_params=filter_params,
        planner=planner,
        name=name,
    )


def scenario_to_document(config: ScenarioConfig) -> dict:
    """Normalized document: every default materialized, tangents explicit."""
    sc = config.scenario
    return {
        "schema_version": SCHEMA_VERSION,
        "name": config.name,
        "units": dict(_UNITS),
        "left_boundary": _boundary_to_doc(sc.left),
        "right_boundary": _boundary_to_doc(sc.right),
        "reference_paths": [np.asarray(p).tolist() for p in sc.reference_paths],
        "vehicle": {
            "length": config.vehicle.length,
            "width": config.vehicle.width,
            "wheelbase": config.vehicle.wheelbase,
            "rear_wheelbase": config.vehicle.rear_wheelbase,
            "n_circles": config.vehicle.n_circles,
        },
        "filter": {
            "dt": config.filter_params.dt,
            "alpha1": config.filter_params.alpha1,
            "gamma_term": config.filter_params.gamma_term,
            "u_min": config.filter_params.u_min.tolist(),
            "u_max": config.filter_params.u_max.tolist(),
            "weights": config.filter_params.weights.tolist(),
        },
        "planner": {
            "kind": config.planner.kind,
            "lookahead": config.planner.lookahead,
            "speed_ref": config.planner.speed_ref,
            "noise_std": config.planner.noise_std,
            "gain": config.planner.gain,
            "target_side": config.planner.target_side,
        },
        "spawn": {"speed_range": list(sc.spawn_speed_range)},
        "duration_steps": sc.duration_steps,
    }


def normalize_document(doc: dict) -> dict:
    """Parse, validate, and re-emit a document with all defaults applied."""
    return scenario_to_document(scenario_from_document(doc))


def validate_document(doc) -> list[str]:
    """Collect human-readable validation errors; empty list means valid."""
    try:
        scenario_from_document(doc)
    except (ParseError, ValidationError) as exc:
        return [str(exc)]
    return []


def load_scenario(path) -> ScenarioConfig:
    """Load and validate a scenario file."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return scenario_from_document(doc)


def save_scenario(config_or_doc, path) -> None:
    """Write a scenario (config or raw document) as normalized JSON."""
    if isinstance(config_or_doc, ScenarioConfig):
        doc = scenario_to_document(config_or_doc)
    else:
        doc = normalize_document(config_or_doc)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
