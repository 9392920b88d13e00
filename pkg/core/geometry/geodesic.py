"""Shortest paths around a convex obstacle.

A geodesic is either one straight segment or a segment, a boundary arc and a
segment, joined at tangency points. Lengths are computed in bulk from the
per-point tangent data so that cost matrices never build explicit paths.
"""

import bisect
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from core.errors import GeometryError
from core.geometry.obstacle import ConvexObstacle, TangentData, wrap
from core.point import Point, as_points

logger = logging.getLogger(__name__)

DEFAULT_CHUNK = 256


@dataclass(frozen=True)
class Segment:
    start: Point
    end: Point

    @property
    def length(self) -> float:
        return self.start.distance(self.end)

    def point_at(self, s: float) -> Point:
        if self.length == 0:
            return self.start
        f = min(max(s / self.length, 0.0), 1.0)
        return Point(
            self.start.x + f * (self.end.x - self.start.x),
            self.start.y + f * (self.end.y - self.start.y),
        )

    def reversed(self) -> 'Segment':
        return Segment(self.end, self.start)


@dataclass(frozen=True)
class Arc:
    """A boundary arc starting at ``theta_start``; clockwise arcs run with decreasing θ."""

    obstacle: ConvexObstacle
    theta_start: float
    length: float
    clockwise: bool

    @property
    def theta_end(self) -> float:
        step = -self.length if self.clockwise else self.length
        return float(wrap(self.theta_start + step, self.obstacle.perimeter))

    @property
    def start(self) -> Point:
        return self.obstacle.boundary_point(self.theta_start)

    @property
    def end(self) -> Point:
        return self.obstacle.boundary_point(self.theta_end)

    def point_at(self, s: float) -> Point:
        s = min(max(s, 0.0), self.length)
        step = -s if self.clockwise else s
        theta = wrap(self.theta_start + step, self.obstacle.perimeter)
        return self.obstacle.boundary_point(float(theta))

    def reversed(self) -> 'Arc':
        return Arc(self.obstacle, self.theta_end, self.length, not self.clockwise)


Piece = Segment | Arc


@dataclass(frozen=True)
class BoundaryContact:
    """Where a path meets the boundary, as path offsets and boundary coordinates.

    ``clockwise`` is None when the path only touches the boundary at an endpoint
    and never runs along it.
    """

    entry_offset: float
    exit_offset: float
    entry_theta: float
    exit_theta: float
    clockwise: bool | None

    @property
    def arc_length(self) -> float:
        return self.exit_offset - self.entry_offset


@dataclass(frozen=True)
class GeodesicPath:
    obstacle: ConvexObstacle
    start: Point
    end: Point
    pieces: tuple[Piece, ...]
    cumulative_lengths: tuple[float, ...]

    @classmethod
    def from_pieces(
        cls, obstacle: ConvexObstacle, start: Point, end: Point, pieces: tuple[Piece, ...]
    ) -> 'GeodesicPath':
        cum = [0.0]
        for piece in pieces:
            cum.append(cum[-1] + piece.length)
        return cls(obstacle, start, end, pieces, tuple(cum))

    @property
    def total_length(self) -> float:
        return self.cumulative_lengths[-1]

    def reversed(self) -> 'GeodesicPath':
        pieces = tuple(p.reversed() for p in reversed(self.pieces))
        return GeodesicPath.from_pieces(self.obstacle, self.end, self.start, pieces)

    def boundary_contact(self) -> BoundaryContact | None:
        obs = self.obstacle
        for k, piece in enumerate(self.pieces):
            if isinstance(piece, Arc):
                return BoundaryContact(
                    entry_offset=self.cumulative_lengths[k],
                    exit_offset=self.cumulative_lengths[k + 1],
                    entry_theta=piece.theta_start,
                    exit_theta=piece.theta_end,
                    clockwise=piece.clockwise,
                )

        ends = as_points([self.start, self.end])
        on = obs.on_boundary_mask(ends)
        if not on.any():
            return None
        theta = obs.boundary_params(ends)
        if on.all():
            # both ends on the boundary: a polygon edge walked along its length
            return BoundaryContact(0.0, self.total_length, float(theta[0]), float(theta[1]), None)
        offset = 0.0 if on[0] else self.total_length
        t = float(theta[0] if on[0] else theta[1])
        return BoundaryContact(offset, offset, t, t, None)

    def sample(self, per_arc: int = 32) -> np.ndarray:
        """Polyline through the path, arcs discretized into ``per_arc`` steps."""
        pts = [self.start.as_array()]
        for piece in self.pieces:
            if isinstance(piece, Arc) and piece.length > 0:
                for s in np.linspace(0.0, piece.length, per_arc + 1)[1:]:
                    pts.append(piece.point_at(float(s)).as_array())
            else:
                pts.append(piece.end.as_array())
        return np.array(pts)


def _side_lengths(tx: TangentData, ty: TangentData, period: float):
    """Lengths of the two wrap-around candidates, broadcast over ``tx`` and ``ty``.

    Side A leaves ``x`` through its counterclockwise-side tangent and runs
    clockwise along the boundary; side B is its mirror image.
    """
    arc_a = wrap(tx.left_theta - ty.right_theta, period)
    arc_b = wrap(ty.left_theta - tx.right_theta, period)
    side_a = (tx.left_reach + ty.right_reach) + arc_a
    side_b = (tx.right_reach + ty.left_reach) + arc_b
    return side_a, side_b, arc_a, arc_b


def _subset(td: TangentData, idx) -> TangentData:
    return TangentData(
        points=td.points[idx],
        left=td.left[idx],
        right=td.right[idx],
        left_theta=td.left_theta[idx],
        right_theta=td.right_theta[idx],
        left_reach=td.left_reach[idx],
        right_reach=td.right_reach[idx],
        on_boundary=td.on_boundary[idx],
    )


def _as_column(td: TangentData) -> TangentData:
    return replace(
        td,
        left_theta=td.left_theta[:, None],
        right_theta=td.right_theta[:, None],
        left_reach=td.left_reach[:, None],
        right_reach=td.right_reach[:, None],
    )


def geodesic(obstacle: ConvexObstacle, x: Point, y: Point) -> GeodesicPath:
    pts = obstacle.check_admissible([x, y])
    x, y = Point.of(pts[0]), Point.of(pts[1])
    if x == y:
        return GeodesicPath.from_pieces(obstacle, x, y, ())

    swap = (x.x, x.y) > (y.x, y.y)
    a, b = (y, x) if swap else (x, y)

    if not obstacle.blocked(pts[:1], pts[1:])[0]:
        path = GeodesicPath.from_pieces(obstacle, a, b, (Segment(a, b),))
        return path.reversed() if swap else path

    td = obstacle.tangent_data([a, b])
    tx, ty = _subset(td, [0]), _subset(td, [1])
    side_a, side_b, arc_a, arc_b = _side_lengths(tx, ty, obstacle.perimeter)

    if side_a[0] <= side_b[0] + obstacle.tol:
        depart, arrive = Point.of(td.left[0]), Point.of(td.right[1])
        arc = Arc(obstacle, float(td.left_theta[0]), float(arc_a[0]), clockwise=True)
    else:
        depart, arrive = Point.of(td.right[0]), Point.of(td.left[1])
        arc = Arc(obstacle, float(td.right_theta[0]), float(arc_b[0]), clockwise=False)

    pieces: list[Piece] = []
    if depart != a:
        pieces.append(Segment(a, depart))
    pieces.append(arc)
    if arrive != b:
        pieces.append(Segment(arrive, b))

    path = GeodesicPath.from_pieces(obstacle, a, b, tuple(pieces))
    return path.reversed() if swap else path


def geodesic_lengths(obstacle: ConvexObstacle, xs, ys) -> np.ndarray:
    """Elementwise obstacle distances between two equally long point batches."""
    xs = obstacle.check_admissible(xs)
    ys = obstacle.check_admissible(ys)
    if xs.shape != ys.shape:
        raise GeometryError(f'point batches differ in size: {len(xs)} vs {len(ys)}')

    out = np.hypot(*(xs - ys).T)
    blocked = obstacle.blocked(xs, ys)
    if blocked.any():
        idx = np.flatnonzero(blocked)
        tx = obstacle.tangent_data(xs[idx])
        ty = obstacle.tangent_data(ys[idx])
        side_a, side_b, _, _ = _side_lengths(tx, ty, obstacle.perimeter)
        out[idx] = np.minimum(side_a, side_b)
    return out


def geodesic_length(obstacle: ConvexObstacle, x: Point, y: Point) -> float:
    return float(geodesic_lengths(obstacle, [x], [y])[0])


def pairwise_lengths(
    obstacle: ConvexObstacle, ps, qs, chunk: int = DEFAULT_CHUNK
) -> np.ndarray:
    """Matrix of obstacle distances ``d[i, j] = d_M(ps[i], qs[j])``."""
    tp = obstacle.tangent_data(ps)
    tq = obstacle.tangent_data(qs)
    p, q = tp.points, tq.points
    n, m = len(p), len(q)
    out = np.empty((n, m))

    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        rows = np.arange(lo, hi)
        diff = p[rows, None, :] - q[None, :, :]
        block = np.hypot(diff[..., 0], diff[..., 1])

        a = np.repeat(p[rows], m, axis=0)
        b = np.tile(q, (len(rows), 1))
        blocked = obstacle.blocked(a, b).reshape(len(rows), m)
        if blocked.any():
            tx = _as_column(_subset(tp, rows))
            side_a, side_b, _, _ = _side_lengths(tx, tq, obstacle.perimeter)
            block = np.where(blocked, np.minimum(side_a, side_b), block)
        out[lo:hi] = block
    return out


def indexed_lengths(
    obstacle: ConvexObstacle, ps, qs, rows: np.ndarray, cols: np.ndarray
) -> np.ndarray:
    """``d_M(ps[rows[k]], qs[cols[k]])`` for index batches, sharing per-point tangent data."""
    tp = obstacle.tangent_data(ps)
    tq = tp if qs is ps else obstacle.tangent_data(qs)
    rows = np.asarray(rows, dtype=int)
    cols = np.asarray(cols, dtype=int)
    a, b = tp.points[rows], tq.points[cols]

    out = np.hypot(*(a - b).T)
    blocked = obstacle.blocked(a, b)
    if blocked.any():
        idx = np.flatnonzero(blocked)
        tx = _subset(tp, rows[idx])
        ty = _subset(tq, cols[idx])
        side_a, side_b, _, _ = _side_lengths(tx, ty, obstacle.perimeter)
        out[idx] = np.minimum(side_a, side_b)
    return out


def path_point(path: GeodesicPath, s: float) -> Point:
    tol = path.obstacle.tol
    if s < -tol or s > path.total_length + tol:
        raise GeometryError(
            f'arc length {s:.6g} outside [0, {path.total_length:.6g}] for this path'
        )
    if not path.pieces:
        return path.start
    s = min(max(s, 0.0), path.total_length)
    if s == 0.0:
        return path.start
    if s == path.total_length:
        return path.end
    k = min(bisect.bisect_right(path.cumulative_lengths, s) - 1, len(path.pieces) - 1)
    return path.pieces[k].point_at(s - path.cumulative_lengths[k])


def betweenness(
    obstacle: ConvexObstacle, w: Point, x: Point, y: Point, z: Point, tol: float
) -> bool:
    d = geodesic_lengths(obstacle, [w, x, y, w], [x, y, z, z])
    return bool(math.fabs(d[0] + d[1] + d[2] - d[3]) <= tol)
