"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class StateModel(BaseModel):
    x: float
    y: float
    psi: float
    v: float
    delta: float


class ActionModel(BaseModel):
    accel: float
    steer_rate: float


class ConstraintRowModel(BaseModel):
    a: list[float]
    b: float
    h: float
    h_dot: float
    circle_index: int
    side: Literal["left", "right"]


class RegisterMapRequest(BaseModel):
    scenario: dict[str, Any]
    map_id: Optional[str] = None  # default: generated


class RegisterMapResponse(BaseModel):
    map_id: str
    name: str


class MapInfo(BaseModel):
    map_id: str
    name: str


class MapListResponse(BaseModel):
    maps: list[MapInfo]


class GenerateMapRequest(BaseModel):
    kind: Literal["loop", "interchange", "intersection", "scurve"]
    seed: int = 0
    lane_width: float = Field(default=0.15, gt=0)
    lanes: int = Field(default=2, ge=1)
    curvature: float = 1.0
    name: Optional[str] = None
    register: bool = False


class GenerateMapResponse(BaseModel):
    scenario: dict[str, Any]
    map_id: Optional[str] = None


class ValidateRequest(BaseModel):
    scenario: dict[str, Any]


class ValidateResponse(BaseModel):
    valid: bool
    errors: list[str]
    normalized: Optional[dict[str, Any]] = None


class CertifyRequest(BaseModel):
    map_id: str
    state: StateModel
    u_nom: ActionModel


class CertifyResponse(BaseModel):
    u_certified: ActionModel
    was_active: bool
    infeasible: bool
    solve_time: float
    distance_time: float
    rows: list[ConstraintRowModel]


class RunRequest(BaseModel):
    map_id: Optional[str] = None
    scenario: Optional[dict[str, Any]] = None  # inline alternative to map_id
    planner: Optional[Literal["pure_pursuit", "adversarial"]] = None
    filter_on: bool = True
    seed: int = 0
    steps: Optional[int] = Field(default=None, ge=0)
    include_rows: bool = True


class StepRecordModel(BaseModel):
    step: int
    state: StateModel
    u_nom: ActionModel
    u_certified: ActionModel
    was_active: bool
    infeasible: bool
    solve_time: float
    distance_time: float
    min_h: float
    collided: bool
    rows: list[ConstraintRowModel]


class RunSummaryModel(BaseModel):
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


class RunResponse(BaseModel):
    summary: RunSummaryModel
    records: list[StepRecordModel]
    scenario: dict[str, Any]  # normalized config, for provenance


class BenchRequest(BaseModel):
    kind: Literal["loop", "interchange", "intersection", "scurve"] = "interchange"
    seed: int = 0
    steps: int = Field(default=300, ge=10)
    n_circles: list[int] = Field(default=[1, 2, 3, 4, 5])


class BenchRowModel(BaseModel):
    n_circles: int
    median_distance_ms: float
    median_solve_ms: float
    median_total_ms: float
    p90_total_ms: float
    diameter_to_width: float
    steps: int


class BenchResponse(BaseModel):
    rows: list[BenchRowModel]


class HealthResponse(BaseModel):
    status: str
