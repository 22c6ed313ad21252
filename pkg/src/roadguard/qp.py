"""Exact solver for the 2-variable minimal-deviation QP.

    min (u - u_nom)^T R (u - u_nom)
    s.t. a_i . u >= b_i  for every constraint row
         u_min <= u <= u_max

With two variables and a handful of constraints the strictly convex QP is
solved exactly by enumerating active sets of size 0, 1, and 2: the
unconstrained point, projections onto single constraints under the metric R,
and all pairwise constraint intersections. The feasible candidate with
nonnegative multipliers and minimal objective is the global optimum. A
grid-scan oracle is provided for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .constraints import CbfConstraintRow

FEASIBILITY_TOL = 1e-9
MULTIPLIER_TOL = 1e-9
RANK_EPS = 1e-12


class QpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass
class QpProblem:
    u_nom: np.ndarray
    weights: np.ndarray  # 2x2 positive-definite diagonal
    rows: list[CbfConstraintRow] = field(default_factory=list)
    u_min: np.ndarray = field(default_factory=lambda: np.array([-40.0, -40.0]))
    u_max: np.ndarray = field(default_factory=lambda: np.array([40.0, 40.0]))

    def __post_init__(self):
        self.u_nom = np.asarray(self.u_nom, dtype=float).reshape(2)
        self.weights = np.asarray(self.weights, dtype=float).reshape(2, 2)
        self.u_min = np.asarray(self.u_min, dtype=float).reshape(2)
        self.u_max = np.asarray(self.u_max, dtype=float).reshape(2)
        if self.weights[0, 1] != 0.0 or self.weights[1, 0] != 0.0:
            raise ValueError("weight matrix must be diagonal")
        if self.weights[0, 0] <= 0.0 or self.weights[1, 1] <= 0.0:
            raise ValueError("weight matrix must be positive definite")

    def constraint_list(self) -> list[tuple[float, float, float]]:
        """Rows then bound faces as (a0, a1, b) triples encoding a . u >= b.

        Bound faces follow the rows in the fixed order: accel lower, accel
        upper, steer-rate lower, steer-rate upper.
        """
        cons = [(float(r.a[0]), float(r.a[1]), float(r.b)) for r in self.rows]
        cons.append((1.0, 0.0, float(self.u_min[0])))
        cons.append((-1.0, 0.0, -float(self.u_max[0])))
        cons.append((0.0, 1.0, float(self.u_min[1])))
        cons.append((0.0, -1.0, -float(self.u_max[1])))
        return cons


@dataclass
class QpSolution:
    """kkt_residual is NaN when not evaluated (oracle solutions)."""

    u: np.ndarray
    status: QpStatus
    active_set: tuple[int, ...]
    objective: float
    kkt_residual: float


def _kkt_residual(u0, u1, un0, un1, r0, r1, cons, active, multipliers) -> float:
    s0 = 2.0 * r0 * (u0 - un0)
    s1 = 2.0 * r1 * (u1 - un1)
    worst_slack = 0.0
    for idx, mu in zip(active, multipliers):
        a0, a1, b = cons[idx]
        s0 -= mu * a0
        s1 -= mu * a1
        worst_slack = max(worst_slack, abs(mu * (a0 * u0 + a1 * u1 - b)))
    violation = max((b - (a0 * u0 + a1 * u1) for a0, a1, b in cons), default=0.0)
    return max(abs(s0), abs(s1), worst_slack, max(violation, 0.0))


def solve(problem: QpProblem) -> QpSolution:
    """Exact minimizer via active-set enumeration.

    Ties are broken deterministically by (objective, active-set size,
    lexicographic indices). Returns INFEASIBLE when no candidate satisfies
    all constraints, with u clipped to the bound box as a placeholder.
    """
    un0, un1 = float(problem.u_nom[0]), float(problem.u_nom[1])
    r0 = float(problem.weights[0, 0])
    r1 = float(problem.weights[1, 1])
    cons = problem.constraint_list()

    def feasible(u0: float, u1: float) -> bool:
        return all(
            a0 * u0 + a1 * u1 >= b - FEASIBILITY_TOL for a0, a1, b in cons
        )

    # Size 0: the nominal action itself, returned verbatim when feasible.
    if feasible(un0, un1):
        return QpSolution(
            u=np.array([un0, un1]),
            status=QpStatus.OPTIMAL,
            active_set=(),
            objective=0.0,
            kkt_residual=_kkt_residual(un0, un1, un0, un1, r0, r1, cons, (), ()),
        )

    candidates = []  # (objective, size, indices, u0, u1, multipliers)

    # Size 1: projection of u_nom onto each constraint under the metric R.
    for i, (a0, a1, b) in enumerate(cons):
        denom = a0 * a0 / r0 + a1 * a1 / r1
        if denom < RANK_EPS:
            continue
        mu = 2.0 * (b - (a0 * un0 + a1 * un1)) / denom
        if mu < -MULTIPLIER_TOL:
            continue
        u0 = un0 + 0.5 * mu * a0 / r0
        u1 = un1 + 0.5 * mu * a1 / r1
        if feasible(u0, u1):
            obj = r0 * (u0 - un0) ** 2 + r1 * (u1 - un1) ** 2
            candidates.append((obj, 1, (i,), u0, u1, (mu,)))

    # Size 2: intersections of constraint pairs.
    n = len(cons)
    for i in range(n):
        a0i, a1i, bi = cons[i]
        for j in range(i + 1, n):
            a0j, a1j, bj = cons[j]
            det = a0i * a1j - a0j * a1i
            if abs(det) < RANK_EPS:
                continue
            u0 = (bi * a1j - bj * a1i) / det
            u1 = (a0i * bj - a0j * bi) / det
            rhs0 = 2.0 * r0 * (u0 - un0)
            rhs1 = 2.0 * r1 * (u1 - un1)
            mu_i = (a1j * rhs0 - a0j * rhs1) / det
            mu_j = (-a1i * rhs0 + a0i * rhs1) / det
            if mu_i < -MULTIPLIER_TOL or mu_j < -MULTIPLIER_TOL:
                continue
            if feasible(u0, u1):
                obj = r0 * (u0 - un0) ** 2 + r1 * (u1 - un1) ** 2
                candidates.append((obj, 2, (i, j), u0, u1, (mu_i, mu_j)))

    if not candidates:
        u_clip = np.clip(problem.u_nom, problem.u_min, problem.u_max)
        return QpSolution(
            u=u_clip,
            status=QpStatus.INFEASIBLE,
            active_set=(),
            objective=math.inf,
            kkt_residual=math.inf,
        )

    obj, _, active, u0, u1, mus = min(candidates, key=lambda c: (c[0], c[1], c[2]))
    return QpSolution(
        u=np.array([u0, u1]),
        status=QpStatus.OPTIMAL,
        active_set=active,
        objective=obj,
        kkt_residual=_kkt_residual(u0, u1, un0, un1, r0, r1, cons, active, mus),
    )


def oracle_solve(problem: QpProblem, resolution: float) -> QpSolution:
    """Brute-force scan of the bound box at the given resolution.

    Keeps the feasible grid point with minimal objective; test-only
    validation tool. kkt_residual is not evaluated (NaN).
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    lo, hi = problem.u_min, problem.u_max
    n0 = max(int(math.ceil((hi[0] - lo[0]) / resolution)) + 1, 2)
    n1 = max(int(math.ceil((hi[1] - lo[1]) / resolution)) + 1, 2)
    g0 = np.linspace(lo[0], hi[0], n0)
    g1 = np.linspace(lo[1], hi[1], n1)
    u0, u1 = np.meshgrid(g0, g1, indexing="ij")

    feas = np.ones(u0.shape, dtype=bool)
    for row in problem.rows:
        feas &= row.a[0] * u0 + row.a[1] * u1 >= row.b - FEASIBILITY_TOL
    if not feas.any():
        return QpSolution(
            u=np.clip(problem.u_nom, lo, hi),
            status=QpStatus.INFEASIBLE,
            active_set=(),
            objective=math.inf,
            kkt_residual=math.nan,
        )
    r0 = float(problem.weights[0, 0])
    r1 = float(problem.weights[1, 1])
    obj = r0 * (u0 - problem.u_nom[0]) ** 2 + r1 * (u1 - problem.u_nom[1]) ** 2
    obj = np.where(feas, obj, np.inf)
    k = int(np.argmin(obj))
    i, j = np.unravel_index(k, obj.shape)
    return QpSolution(
        u=np.array([g0[i], g1[j]]),
        status=QpStatus.OPTIMAL,
        active_set=(),
        objective=float(obj[i, j]),
        kkt_residual=math.nan,
    )
