"""HTTP service exposing the safety filter, simulator, and map tooling.

Maps are registered once and referenced by id, so per-step /certify calls
carry only the state and nominal action. All handlers are stateless apart
from the map registry, which is guarded by a lock.
"""

from __future__ import annotations

import threading
import uuid

from fastapi import FastAPI, HTTPException

from .. import bench as bench_mod
from ..filter import certify
from ..maps import generate_map
from ..scenario_io import (
    ParseError,
    ValidationError,
    scenario_from_document,
    scenario_to_document,
)
from ..simulation import ConfigError, ScenarioConfig, StepRecord, run_scenario
from ..vehicle import ControlAction, VehicleState
from .schemas import (
    ActionModel,
    BenchRequest,
    BenchResponse,
    BenchRowModel,
    CertifyRequest,
    CertifyResponse,
    ConstraintRowModel,
    GenerateMapRequest,
    GenerateMapResponse,
    HealthResponse,
    MapInfo,
    MapListResponse,
    RegisterMapRequest,
    RegisterMapResponse,
    RunRequest,
    RunResponse,
    RunSummaryModel,
    StateModel,
    StepRecordModel,
    ValidateRequest,
    ValidateResponse,
)


class MapRegistry:
    def __init__(self):
        self._lock = threading.Lock()
        self._maps: dict[str, ScenarioConfig] = {}

    def register(self, config: ScenarioConfig, map_id: str | None = None) -> str:
        with self._lock:
            key = map_id or uuid.uuid4().hex[:12]
            self._maps[key] = config
            return key

    def get(self, map_id: str) -> ScenarioConfig:
        with self._lock:
            config = self._maps.get(map_id)
        if config is None:
            raise HTTPException(status_code=404, detail=f"unknown map_id {map_id!r}")
        return config

    def list(self) -> list[tuple[str, str]]:
        with self._lock:
            return [(key, cfg.name) for key, cfg in self._maps.items()]


def _rows_to_models(rows) -> list[ConstraintRowModel]:
    return [
        ConstraintRowModel(
            a=[float(r.a[0]), float(r.a[1])],
            b=r.b,
            h=r.h,
            h_dot=r.h_dot,
            circle_index=r.circle_index,
            side=r.side.value,
        )
        for r in rows
    ]


def record_to_model(record: StepRecord, include_rows: bool = True) -> StepRecordModel:
    out = record.outcome
    return StepRecordModel(
        step=record.step,
        state=StateModel(
            x=record.state.x,
            y=record.state.y,
            psi=record.state.psi,
            v=record.state.v,
            delta=record.state.delta,
        ),
        u_nom=ActionModel(accel=record.u_nom.accel, steer_rate=record.u_nom.steer_rate),
        u_certified=ActionModel(
            accel=out.u_certified.accel, steer_rate=out.u_certified.steer_rate
        ),
        was_active=out.was_active,
        infeasible=out.infeasible,
        solve_time=out.solve_time,
        distance_time=out.distance_time,
        min_h=record.min_h,
        collided=record.collided,
        rows=_rows_to_models(out.rows) if include_rows else [],
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="roadguard",
        description=(
            "Safety filter certifying vehicle control actions against "
            "polyline road boundaries, plus a closed-loop simulation harness."
        ),
    )
    registry = MapRegistry()

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok")

    @app.post("/maps", response_model=RegisterMapResponse)
    def register_map(req: RegisterMapRequest):
        try:
            config = scenario_from_document(req.scenario)
        except (ParseError, ValidationError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        map_id = registry.register(config, req.map_id)
        return RegisterMapResponse(map_id=map_id, name=config.name)

    @app.get("/maps", response_model=MapListResponse)
    def list_maps():
        return MapListResponse(
            maps=[MapInfo(map_id=k, name=n) for k, n in registry.list()]
        )

    @app.post("/maps/generate", response_model=GenerateMapResponse)
    def generate(req: GenerateMapRequest):
        doc = generate_map(
            req.kind,
            req.seed,
            lane_width=req.lane_width,
            lanes=req.lanes,
            curvature=req.curvature,
            name=req.name,
        )
        map_id = None
        if req.register:
            map_id = registry.register(scenario_from_document(doc))
        return GenerateMapResponse(scenario=doc, map_id=map_id)

    @app.post("/scenarios/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest):
        try:
            config = scenario_from_document(req.scenario)
        except (ParseError, ValidationError) as exc:
            return ValidateResponse(valid=False, errors=[str(exc)])
        return ValidateResponse(
            valid=True, errors=[], normalized=scenario_to_document(config)
        )

    @app.post("/certify", response_model=CertifyResponse)
    def certify_action(req: CertifyRequest):
        config = registry.get(req.map_id)
        state = VehicleState(
            x=req.state.x,
            y=req.state.y,
            psi=req.state.psi,
            v=req.state.v,
            delta=req.state.delta,
        )
        u_nom = ControlAction(req.u_nom.accel, req.u_nom.steer_rate)
        outcome = certify(
            state,
            u_nom,
            config.vehicle,
            config.filter_params,
            config.scenario.left,
            config.scenario.right,
        )
        return CertifyResponse(
            u_certified=ActionModel(
                accel=outcome.u_certified.accel,
                steer_rate=outcome.u_certified.steer_rate,
            ),
            was_active=outcome.was_active,
            infeasible=outcome.infeasible,
            solve_time=outcome.solve_time,
            distance_time=outcome.distance_time,
            rows=_rows_to_models(outcome.rows),
        )

    @app.post("/runs", response_model=RunResponse)
    def run(req: RunRequest):
        if (req.map_id is None) == (req.scenario is None):
            raise HTTPException(
                status_code=422, detail="provide exactly one of map_id or scenario"
            )
        if req.map_id is not None:
            config = registry.get(req.map_id)
        else:
            try:
                config = scenario_from_document(req.scenario)
            except (ParseError, ValidationError) as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        planner = None
        if req.planner is not None:
            planner = config.planner.__class__(
                kind=req.planner,
                lookahead=config.planner.lookahead,
                speed_ref=config.planner.speed_ref,
                noise_std=config.planner.noise_std,
                gain=config.planner.gain,
                target_side=config.planner.target_side,
            )
        try:
            records, summary = run_scenario(
                config,
                filter_on=req.filter_on,
                seed=req.seed,
                planner=planner,
                duration_steps=req.steps,
            )
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return RunResponse(
            summary=RunSummaryModel(
                steps=summary.steps,
                collisions=summary.collisions,
                resets=summary.resets,
                activity_rate=summary.activity_rate,
                infeasible_steps=summary.infeasible_steps,
                min_h=summary.min_h,
                median_solve_time=summary.median_solve_time,
                median_distance_time=summary.median_distance_time,
                p90_solve_time=summary.p90_solve_time,
                p90_distance_time=summary.p90_distance_time,
                planner=summary.planner,
                filter_on=summary.filter_on,
                seed=summary.seed,
            ),
            records=[record_to_model(r, req.include_rows) for r in records],
            scenario=scenario_to_document(config),
        )

    @app.post("/bench", response_model=BenchResponse)
    def run_bench(req: BenchRequest):
        rows = bench_mod.run_bench(
            kind=req.kind,
            seed=req.seed,
            steps=req.steps,
            n_circles=tuple(req.n_circles),
        )
        return BenchResponse(
            rows=[BenchRowModel(**d) for d in bench_mod.rows_to_dicts(rows)]
        )

    return app


app = create_app()
