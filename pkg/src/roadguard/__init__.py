"""Safety filter for vehicle motion against polyline road boundaries.

Certifies nominal control actions by assembling barrier constraints over a
signed pseudo-distance field and solving a small minimal-deviation QP, with
a closed-loop simulation harness, procedural maps, an HTTP service, and a
CLI on top.
"""

from .constraints import (
    CbfConstraintRow,
    FilterParams,
    Side,
    build_all_rows,
    build_row,
    evaluate_h,
)
from .filter import FilterOutcome, certify
from .geometry import (
    DistanceEvaluation,
    InteriorSide,
    PolylineBoundary,
    TangentSegment,
    distance_gradient,
    distance_hessian,
    polyline_pseudo_distance,
    segment_pseudo_distance,
    signed_distance,
    signed_distance_batch,
)
from .maps import generate_config, generate_map
from .planners import PlannerConfig, adversarial_planner, pure_pursuit_planner
from .qp import QpProblem, QpSolution, QpStatus, oracle_solve, solve
from .scenario_io import (
    ParseError,
    ValidationError,
    load_scenario,
    save_scenario,
    scenario_from_document,
    scenario_to_document,
)
from .simulation import (
    ConfigError,
    RunSummary,
    Scenario,
    ScenarioConfig,
    StepRecord,
    collision_check,
    min_barrier_value,
    run_scenario,
    step,
)
from .vehicle import (
    CircleKinematics,
    ControlAction,
    VehicleParams,
    VehicleState,
    circle_kinematics,
    circle_layout,
    dynamics,
)

__version__ = "0.1.0"

__all__ = [
    "CbfConstraintRow",
    "CircleKinematics",
    "ConfigError",
    "ControlAction",
    "DistanceEvaluation",
    "FilterOutcome",
    "FilterParams",
    "InteriorSide",
    "ParseError",
    "PlannerConfig",
    "PolylineBoundary",
    "QpProblem",
    "QpSolution",
    "QpStatus",
    "RunSummary",
    "Scenario",
    "ScenarioConfig",
    "Side",
    "StepRecord",
    "TangentSegment",
    "ValidationError",
    "VehicleParams",
    "VehicleState",
    "adversarial_planner",
    "build_all_rows",
    "build_row",
    "certify",
    "circle_kinematics",
    "circle_layout",
    "collision_check",
    "distance_gradient",
    "distance_hessian",
    "dynamics",
    "evaluate_h",
    "generate_config",
    "generate_map",
    "load_scenario",
    "min_barrier_value",
    "oracle_solve",
    "polyline_pseudo_distance",
    "pure_pursuit_planner",
    "run_scenario",
    "save_scenario",
    "scenario_from_document",
    "scenario_to_document",
    "segment_pseudo_distance",
    "signed_distance",
    "signed_distance_batch",
    "solve",
    "step",
]
