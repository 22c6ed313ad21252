"""Signed pseudo-distance to tangent-augmented polylines.

The distance from a point to a segment is measured along the normal of a
tangent field interpolated between the segment's endpoint tangents, instead
of along the perpendicular to the chord. Minimizing over segments gives a
field whose gradient stays continuous across segment junctions, so the field
can be differentiated numerically and used as a constraint function.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

logger = logging.getLogger(__name__)

# Segments shorter than this are rejected outright.
MIN_SEGMENT_LENGTH = 1e-9
# |quadratic coefficient| below this: solve the orthogonality condition as linear.
_LINEAR_EPS = 1e-12
# Roots this far outside [0, 1] still count as interior (then clamped).
_ROOT_SLACK = 1e-12
# Default central-difference steps, tuned for maps with ~0.1 m features.
GRADIENT_STEP = 1e-5
HESSIAN_STEP = 1e-3
# Bounding-box pruning only pays off beyond this many segments.
_PRUNE_THRESHOLD = 32


class GeometryError(ValueError):
    """Base class for boundary geometry failures."""


class DegenerateSegment(GeometryError):
    """Segment endpoints coincide (length below MIN_SEGMENT_LENGTH)."""


class EmptyBoundary(GeometryError):
    """Boundary carries no usable segments."""


class InteriorSide(Enum):
    """Which side of the travel direction the drivable region lies on."""

    LEFT_OF_TRAVEL = "left_of_travel"
    RIGHT_OF_TRAVEL = "right_of_travel"


def _as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(2)
    return a


def _normalized(v: np.ndarray, what: str) -> np.ndarray:
    n = float(np.hypot(v[0], v[1]))
    if n < MIN_SEGMENT_LENGTH:
        raise GeometryError(f"{what} has near-zero length")
    return v / n


@dataclass
class TangentSegment:
    """Line segment whose endpoints carry unit tangent directions.

    Tangents are normalized on construction; the interpolated tangent at
    parameter lam is t1 + lam * (t2 - t1).
    """

    p1: np.ndarray
    p2: np.ndarray
    t1: np.ndarray
    t2: np.ndarray

    def __post_init__(self):
        self.p1 = _as_point(self.p1)
        self.p2 = _as_point(self.p2)
        if float(np.hypot(*(self.p2 - self.p1))) < MIN_SEGMENT_LENGTH:
            raise DegenerateSegment("segment endpoints coincide")
        self.t1 = _normalized(_as_point(self.t1), "tangent t1")
        self.t2 = _normalized(_as_point(self.t2), "tangent t2")


def default_tangents(points: np.ndarray) -> np.ndarray:
    """Unit tangents from neighboring chords.

    Interior point k uses the chord points[k-1] -> points[k+1]; the endpoints
    use their single adjacent chord. A closed polyline (first point equal to
    last) wraps the neighbor lookup so the tangent field is continuous across
    the seam.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    closed = n > 2 and np.hypot(*(pts[0] - pts[-1])) < MIN_SEGMENT_LENGTH
    tangents = np.empty_like(pts)
    for k in range(n):
        if closed:
            prev = pts[k - 1 if k > 0 else n - 2]
            nxt = pts[(k + 1) % n if k < n - 1 else 1]
        else:
            prev = pts[max(k - 1, 0)]
            nxt = pts[min(k + 1, n - 1)]
        tangents[k] = _normalized(nxt - prev, f"tangent at point {k}")
    return tangents


class PolylineBoundary:
    """Oriented polyline with per-point tangents and an interior-side flag.

    Points are ordered along the travel direction. The signed distance field
    is positive on the configured interior side of the local tangent.
    """

    def __init__(self, points, interior_side: InteriorSide, tangents=None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise GeometryError("boundary needs at least 2 planar points")
        gaps = np.hypot(*(pts[1:] - pts[:-1]).T)
        short = np.nonzero(gaps < MIN_SEGMENT_LENGTH)[0]
        if len(short):
            raise DegenerateSegment(
                f"duplicate consecutive points at index {int(short[0])}"
            )
        if tangents is None:
            tans = default_tangents(pts)
        else:
            tans = np.asarray(tangents, dtype=float)
            if tans.shape != pts.shape:
                raise GeometryError("tangents must match points one-to-one")
            norms = np.hypot(*tans.T)
            bad = np.nonzero(norms < MIN_SEGMENT_LENGTH)[0]
            if len(bad):
                raise GeometryError(f"zero tangent at point {int(bad[0])}")
            tans = tans / norms[:, None]

        self.points = pts
        self.tangents = tans
        self.interior_side = InteriorSide(interior_side)
        # Per-segment arrays kept for vectorized evaluation.
        self._p1 = pts[:-1]
        self._p2 = pts[1:]
        self._t1 = tans[:-1]
        self._t2 = tans[1:]
        self._box_lo = np.minimum(self._p1, self._p2)
        self._box_hi = np.maximum(self._p1, self._p2)

    @property
    def num_segments(self) -> int:
        return len(self._p1)

    @property
    def segments(self) -> list[TangentSegment]:
        return [
            TangentSegment(self._p1[j], self._p2[j], self._t1[j], self._t2[j])
            for j in range(self.num_segments)
        ]


@dataclass
class DistanceEvaluation:
    """Signed distance plus its numerically differentiated local expansion.

    ``lam`` locates the foot point on the winning segment; the sign is
    positive on the boundary's interior side.
    """

    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    segment_index: int
    lam: float


def _distance_table(points, p1, p2, t1, t2):
    """Per point/segment pseudo-distance, interpolation parameter, root flag.

    Shapes: points (m, 2); segment arrays (n, 2). Returns dist and lam of
    shape (m, n) plus a boolean mask marking cells solved by an interior
    root of the orthogonality condition (False means endpoint fallback).
    """
    a = points[:, None, :] - p1[None, :, :]  # (m, n, 2)
    d = (p2 - p1)[None, :, :]
    e = (t2 - t1)[None, :, :]
    t1b = t1[None, :, :]

    # Orthogonality (p - p_lam) . t_lam = 0 expands to
    # qa*lam^2 + qb*lam + qc = 0 with:
    qa = -(d * e).sum(-1)  # (1, n)
    qb = (a * e).sum(-1) - (d * t1b).sum(-1)  # (m, n)
    qc = (a * t1b).sum(-1)  # (m, n)

    qa_b = np.broadcast_to(qa, qb.shape)
    linear = np.abs(qa_b) < _LINEAR_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = qb * qb - 4.0 * qa_b * qc
        sq = np.sqrt(np.maximum(disc, 0.0))
        denom = 2.0 * qa_b
        root_a = np.where(linear, -qc / qb, (-qb + sq) / denom)
        root_b = np.where(linear, np.nan, (-qb - sq) / denom)
    root_a = np.where(~linear & (disc < 0.0), np.nan, root_a)
    root_b = np.where(~linear & (disc < 0.0), np.nan, root_b)

    def _candidate(lam):
        ok = np.isfinite(lam) & (lam >= -_ROOT_SLACK) & (lam <= 1.0 + _ROOT_SLACK)
        lam_c = np.clip(lam, 0.0, 1.0)
        n_vec = a - lam_c[..., None] * d
        dist = np.hypot(n_vec[..., 0], n_vec[..., 1])
        return np.where(ok, dist, np.inf), np.where(ok, lam_c, 0.0)

    dist_a, lam_a = _candidate(root_a)
    dist_b, lam_b = _candidate(root_b)
    # Two qualifying roots: keep the one with the smaller |n_lam|.
    use_b = dist_b < dist_a
    dist_root = np.where(use_b, dist_b, dist_a)
    lam_root = np.where(use_b, lam_b, lam_a)
    has_root = np.isfinite(dist_root)

    # No interior root: fall back to the nearer endpoint (orthogonality-free).
    dist_p1 = np.hypot(a[..., 0], a[..., 1])
    dist_p2 = np.hypot(*(a - d).transpose(2, 0, 1))
    use_p2 = dist_p2 < dist_p1
    dist_fb = np.where(use_p2, dist_p2, dist_p1)
    lam_fb = np.where(use_p2, 1.0, 0.0)

    dist = np.where(has_root, dist_root, dist_fb)
    lam = np.where(has_root, lam_root, lam_fb)
    return dist, lam, has_root


def segment_distances(points, boundary: PolylineBoundary):
    """Pseudo-distance table from each probe point to every segment.

    Returns ``(dist, lam, has_root)`` with shape (len(points), num_segments).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if boundary.num_segments == 0:
        raise EmptyBoundary("boundary has no segments")
    return _distance_table(pts, boundary._p1, boundary._p2, boundary._t1, boundary._t2)


def segment_pseudo_distance(p, seg: TangentSegment) -> tuple[float, float]:
    """Pseudo-distance magnitude and interpolation parameter for one segment."""
    pts = _as_point(p)[None, :]
    dist, lam, _ = _distance_table(
        pts, seg.p1[None], seg.p2[None], seg.t1[None], seg.t2[None]
    )
    return float(dist[0, 0]), float(lam[0, 0])


def _prune(points: np.ndarray, boundary: PolylineBoundary) -> np.ndarray | None:
    """Indices of segments that can possibly win for any point of the batch."""
    if boundary.num_segments <= _PRUNE_THRESHOLD:
        return None
    centroid = points.mean(axis=0)
    radius = float(np.max(np.hypot(*(points - centroid).T))) if len(points) > 1 else 0.0
    lo, hi = boundary._box_lo, boundary._box_hi
    gap = np.maximum(lo - centroid, 0.0) + np.maximum(centroid - hi, 0.0)
    near = np.hypot(gap[:, 0], gap[:, 1])  # centroid to box, 0 if inside
    far_x = np.maximum(np.abs(centroid[0] - lo[:, 0]), np.abs(centroid[0] - hi[:, 0]))
    far_y = np.maximum(np.abs(centroid[1] - lo[:, 1]), np.abs(centroid[1] - hi[:, 1]))
    far = np.hypot(far_x, far_y)  # centroid to farthest box corner
    upper = float(np.min(far)) + radius
    keep = np.nonzero(near - radius <= upper + 1e-12)[0]
    return keep


def signed_distance_batch(points, boundary: PolylineBoundary) -> np.ndarray:
    """Signed pseudo-distance for a batch of points (values only)."""
    values, _, _ = _evaluate_batch(points, boundary)
    return values


def signed_distance(p, boundary: PolylineBoundary) -> float:
    """Signed pseudo-distance from a single point (value only)."""
    values, _, _ = _evaluate_batch(np.asarray(p, dtype=float)[None, :], boundary)
    return float(values[0])


def _evaluate_batch(points, boundary: PolylineBoundary):
    """Signed values, winning segment indices, and parameters for a batch."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if boundary.num_segments == 0:
        raise EmptyBoundary("boundary has no segments")
    keep = _prune(pts, boundary)
    if keep is None:
        p1, p2, t1, t2 = boundary._p1, boundary._p2, boundary._t1, boundary._t2
        index_map = None
    else:
        p1, p2 = boundary._p1[keep], boundary._p2[keep]
        t1, t2 = boundary._t1[keep], boundary._t2[keep]
        index_map = keep
    dist, lam, _ = _distance_table(pts, p1, p2, t1, t2)

    local = np.argmin(dist, axis=1)
    rows = np.arange(len(pts))
    best = dist[rows, local]
    lam_w = lam[rows, local]
    # Sign from the winning segment: which side of the interpolated tangent.
    t_w = t1[local] + lam_w[:, None] * (t2[local] - t1[local])
    n_w = (pts - p1[local]) - lam_w[:, None] * (p2[local] - p1[local])
    cross = t_w[:, 0] * n_w[:, 1] - t_w[:, 1] * n_w[:, 0]
    if boundary.interior_side is InteriorSide.LEFT_OF_TRAVEL:
        inside = cross > 0.0
    else:
        inside = cross < 0.0
    values = np.where(inside, best, -best)
    seg_idx = local if index_map is None else index_map[local]
    return values, seg_idx, lam_w


def distance_gradient(
    p, boundary: PolylineBoundary, step: float = GRADIENT_STEP
) -> np.ndarray:
    """Central-difference gradient of the signed pseudo-distance."""
    if step <= 0.0:
        raise ValueError("step must be positive")
    p = _as_point(p)
    stencil = p + step * np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
    f = signed_distance_batch(stencil, boundary)
    return np.array([f[0] - f[1], f[2] - f[3]]) / (2.0 * step)


def distance_hessian(
    p, boundary: PolylineBoundary, step: float = HESSIAN_STEP
) -> np.ndarray:
    """Symmetrized central second differences of the signed pseudo-distance."""
    if step <= 0.0:
        raise ValueError("step must be positive")
    p = _as_point(p)
    offs = np.array(
        [[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [1, -1], [-1, 1], [-1, -1]],
        dtype=float,
    )
    f = signed_distance_batch(p + step * offs, boundary)
    s2 = step * step
    hxx = (f[1] - 2.0 * f[0] + f[2]) / s2
    hyy = (f[3] - 2.0 * f[0] + f[4]) / s2
    hxy = (f[5] - f[6] - f[7] + f[8]) / (4.0 * s2)
    hess = np.array([[hxx, hxy], [hxy, hyy]])
    return 0.5 * (hess + hess.T)


def polyline_pseudo_distance(p, boundary: PolylineBoundary) -> DistanceEvaluation:
    """Signed pseudo-distance with finite-difference gradient and Hessian.

    One batched evaluation covers the full 13-point stencil: the center,
    4 gradient points at GRADIENT_STEP, and 8 Hessian points at HESSIAN_STEP.
    """
    p = _as_point(p)
    gs, hs = GRADIENT_STEP, HESSIAN_STEP
    stencil = np.array(
        [
            [0.0, 0.0],
            [gs, 0.0],
            [-gs, 0.0],
            [0.0, gs],
            [0.0, -gs],
            [hs, 0.0],
            [-hs, 0.0],
            [0.0, hs],
            [0.0, -hs],
            [hs, hs],
            [hs, -hs],
            [-hs, hs],
            [-hs, -hs],
        ]
    )
    values, seg_idx, lam = _evaluate_batch(p + stencil, boundary)
    f = values
    grad = np.array([f[1] - f[2], f[3] - f[4]]) / (2.0 * gs)
    s2 = hs * hs
    hxx = (f[5] - 2.0 * f[0] + f[6]) / s2
    hyy = (f[7] - 2.0 * f[0] + f[8]) / s2
    hxy = (f[9] - f[10] - f[11] + f[12]) / (4.0 * s2)
    hess = np.array([[hxx, hxy], [hxy, hyy]])
    hess = 0.5 * (hess + hess.T)
    return DistanceEvaluation(
        value=float(f[0]),
        gradient=grad,
        hessian=hess,
        segment_index=int(seg_idx[0]),
        lam=float(lam[0]),
    )


def closest_point_on_polyline(p, points) -> tuple[float, np.ndarray, int, float]:
    """Euclidean closest point on a plain polyline.

    Returns (distance, closest point, segment index, parameter in [0, 1]).
    Used as the non-smooth baseline and by the planners; unrelated to the
    tangent-interpolated field above.
    """
    p = _as_point(p)
    pts = np.asarray(points, dtype=float)
    p1, p2 = pts[:-1], pts[1:]
    d = p2 - p1
    len2 = (d * d).sum(-1)
    t = np.clip(((p - p1) * d).sum(-1) / np.maximum(len2, 1e-18), 0.0, 1.0)
    feet = p1 + t[:, None] * d
    dist = np.hypot(*(p - feet).T)
    j = int(np.argmin(dist))
    return float(dist[j]), feet[j], j, float(t[j])


def euclidean_polyline_distance(p, points) -> float:
    """Unsigned Euclidean distance from a point to a polyline."""
    return closest_point_on_polyline(p, points)[0]
