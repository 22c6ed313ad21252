"""Timing sweep over the number of cover circles.

Runs the filter in closed loop against an adversarial nominal planner, so
the QP is regularly active, and reports per-step medians for the two cost
centers: distance-field evaluation (constraint assembly) and the QP solve.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .maps import generate_config
from .planners import PlannerConfig
from .simulation import run_scenario
from .vehicle import VehicleParams


@dataclass
class BenchRow:
    n_circles: int
    median_distance_ms: float
    median_solve_ms: float
    median_total_ms: float
    p90_total_ms: float
    diameter_to_width: float
    steps: int


def run_bench(
    kind: str = "interchange",
    seed: int = 0,
    steps: int = 300,
    n_circles: tuple[int, ...] = (1, 2, 3, 4, 5),
) -> list[BenchRow]:
    """Median per-step timings for each circle count on one map."""
    base = generate_config(kind, seed)
    rows = []
    for n in n_circles:
        vehicle = replace(base.vehicle, n_circles=int(n))
        config = replace(base, vehicle=vehicle)
        planner = PlannerConfig(kind="adversarial", speed_ref=0.3)
        records, _ = run_scenario(
            config, filter_on=True, seed=seed, planner=planner, duration_steps=steps
        )
        dist = np.array([r.outcome.distance_time for r in records]) * 1e3
        solve = np.array([r.outcome.solve_time for r in records]) * 1e3
        total = dist + solve
        rows.append(
            BenchRow(
                n_circles=int(n),
                median_distance_ms=float(np.median(dist)),
                median_solve_ms=float(np.median(solve)),
                median_total_ms=float(np.median(total)),
                p90_total_ms=float(np.percentile(total, 90)),
                diameter_to_width=2.0 * vehicle.circle_radius / vehicle.width,
                steps=len(records),
            )
        )
    return rows


def format_table(rows: list[BenchRow]) -> str:
    """Tab-separated table with a header line."""
    header = (
        "n_circles\tmedian_distance_ms\tmedian_solve_ms\tmedian_total_ms"
        "\tp90_total_ms\tdiameter_to_width\tsteps"
    )
    lines = [header]
    for r in rows:
        lines.append(
            f"{r.n_circles}\t{r.median_distance_ms:.4f}\t{r.median_solve_ms:.4f}"
            f"\t{r.median_total_ms:.4f}\t{r.p90_total_ms:.4f}"
            f"\t{r.diameter_to_width:.4f}\t{r.steps}"
        )
    return "\n".join(lines)


def pearson_r(x, y) -> float:
    """Pearson correlation of two equal-length sequences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    denom = float(np.sqrt((xc * xc).sum() * (yc * yc).sum()))
    if denom == 0.0:
        return 0.0
    return float((xc * yc).sum() / denom)


def _dataclass_dict(row: BenchRow) -> dict:
    return {
        "n_circles": row.n_circles,
        "median_distance_ms": row.median_distance_ms,
        "median_solve_ms": row.median_solve_ms,
        "median_total_ms": row.median_total_ms,
        "p90_total_ms": row.p90_total_ms,
        "diameter_to_width": row.diameter_to_width,
        "steps": row.steps,
    }


def rows_to_dicts(rows: list[BenchRow]) -> list[dict]:
    return [_dataclass_dict(r) for r in rows]
