"""Convex obstacles in the plane: a disk or a strictly convex polygon.

Boundary coordinates are arc lengths measured counterclockwise from a fixed
reference point on the boundary: ``center + (radius, 0)`` for a disk and
vertex 0 for a polygon. All point arguments of the vectorized methods are
``(n, 2)`` float arrays.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import ClassVar

import numpy as np

from core.errors import GeometryError
from core.point import Point, as_points

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9


def wrap(theta: np.ndarray | float, period: float) -> np.ndarray:
    """Reduce boundary coordinates into ``[0, period)``."""
    out = np.mod(np.asarray(theta, dtype=float), period)
    return np.where(out >= period, 0.0, out)


@dataclass(frozen=True)
class TangentData:
    """Tangent construction for a batch of admissible points.

    ``left`` is the tangency point found by turning counterclockwise from the
    direction towards the obstacle, ``right`` the clockwise one. A point on the
    boundary is its own tangency point on both sides.
    """

    points: np.ndarray
    left: np.ndarray
    right: np.ndarray
    left_theta: np.ndarray
    right_theta: np.ndarray
    left_reach: np.ndarray
    right_reach: np.ndarray
    on_boundary: np.ndarray


class ConvexObstacle(ABC):
    kind: ClassVar[str]
    tol: float

    @property
    @abstractmethod
    def perimeter(self) -> float: ...

    @property
    @abstractmethod
    def center(self) -> np.ndarray:
        """A point of the open interior used as reference for densities and drawing."""

    @property
    @abstractmethod
    def radius_bound(self) -> float:
        """Largest distance from ``center`` to the boundary."""

    @abstractmethod
    def interior_mask(self, points: np.ndarray) -> np.ndarray:
        """True where a point lies inside the obstacle by more than ``tol``."""

    @abstractmethod
    def boundary_distance(self, points: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def boundary_params(self, points: np.ndarray) -> np.ndarray:
        """Boundary coordinate of the boundary point nearest to each point."""

    @abstractmethod
    def boundary_points(self, theta: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _tangents_outside(
        self, points: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]: ...

    @abstractmethod
    def _blocked(self, a: np.ndarray, b: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def to_dict(self) -> dict: ...

    def with_tolerance(self, tol: float) -> 'ConvexObstacle':
        return replace(self, tol=tol)

    def check_admissible(self, points, label: str = 'point') -> np.ndarray:
        pts = as_points(points)
        inside = self.interior_mask(pts)
        if inside.any():
            idx = int(np.flatnonzero(inside)[0])
            x, y = pts[idx]
            raise GeometryError(
                f'{label} {idx} at ({x:.6g}, {y:.6g}) lies inside the {self.kind} obstacle'
            )
        return pts

    def on_boundary_mask(self, points: np.ndarray) -> np.ndarray:
        return self.boundary_distance(points) <= self.tol

    def blocked(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """True where the open segment ``(a_i, b_i)`` meets the obstacle interior."""
        a = as_points(a)
        b = as_points(b)
        # NOTE: evaluate every segment from its lexicographically smaller end so the
        # test is exactly symmetric in its arguments
        swap = (a[:, 0] > b[:, 0]) | ((a[:, 0] == b[:, 0]) & (a[:, 1] > b[:, 1]))
        lo = np.where(swap[:, None], b, a)
        hi = np.where(swap[:, None], a, b)
        return self._blocked(lo, hi)

    def tangent_data(self, points) -> TangentData:
        pts = self.check_admissible(points)
        n = len(pts)
        on = self.on_boundary_mask(pts)
        left = np.empty((n, 2))
        right = np.empty((n, 2))
        left_theta = np.empty(n)
        right_theta = np.empty(n)

        if on.any():
            theta = self.boundary_params(pts[on])
            foot = self.boundary_points(theta)
            left[on] = foot
            right[on] = foot
            left_theta[on] = theta
            right_theta[on] = theta

        out = ~on
        if out.any():
            lft, rgt, lt, rt = self._tangents_outside(pts[out])
            left[out] = lft
            right[out] = rgt
            left_theta[out] = lt
            right_theta[out] = rt

        return TangentData(
            points=pts,
            left=left,
            right=right,
            left_theta=left_theta,
            right_theta=right_theta,
            left_reach=np.hypot(*(pts - left).T),
            right_reach=np.hypot(*(pts - right).T),
            on_boundary=on,
        )

    def segment_clear(self, x: Point, y: Point) -> bool:
        pts = self.check_admissible([x, y])
        return not bool(self.blocked(pts[:1], pts[1:])[0])

    def tangent_points(self, p: Point) -> tuple[Point, Point]:
        """Tangency points seen from ``p``, counterclockwise side first."""
        pts = self.check_admissible([p])
        if self.on_boundary_mask(pts)[0]:
            raise GeometryError(
                f'tangent points need a point strictly outside the obstacle, got ({p.x}, {p.y})'
            )
        left, right, _, _ = self._tangents_outside(pts)
        return Point.of(left[0]), Point.of(right[0])

    def boundary_param(self, q: Point) -> float:
        pts = as_points([q])
        dist = float(self.boundary_distance(pts)[0])
        if dist > self.tol:
            raise GeometryError(
                f'point ({q.x}, {q.y}) is {dist:.3g} away from the boundary '
                f'(tolerance {self.tol:.3g})'
            )
        return float(self.boundary_params(pts)[0])

    def boundary_point(self, theta: float) -> Point:
        return Point.of(self.boundary_points(np.array([theta]))[0])


@dataclass(frozen=True)
class DiskObstacle(ConvexObstacle):
    kind: ClassVar[str] = 'disk'

    center_point: Point
    radius: float
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise GeometryError(f'disk radius must be positive, got {self.radius}')

    @property
    def perimeter(self) -> float:
        return 2.0 * math.pi * self.radius

    @property
    def center(self) -> np.ndarray:
        return self.center_point.as_array()

    @property
    def radius_bound(self) -> float:
        return self.radius

    def _polar(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        rel = as_points(points) - self.center
        return np.hypot(rel[:, 0], rel[:, 1]), np.arctan2(rel[:, 1], rel[:, 0])

    def interior_mask(self, points: np.ndarray) -> np.ndarray:
        rho, _ = self._polar(points)
        return rho < self.radius - self.tol

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        rho, _ = self._polar(points)
        return np.abs(rho - self.radius)

    def boundary_params(self, points: np.ndarray) -> np.ndarray:
        _, angle = self._polar(points)
        return wrap(self.radius * angle, self.perimeter)

    def boundary_points(self, theta: np.ndarray) -> np.ndarray:
        angle = np.asarray(theta, dtype=float) / self.radius
        return self.center + self.radius * np.column_stack([np.cos(angle), np.sin(angle)])

    def _tangents_outside(self, points):
        rho, beta = self._polar(points)
        alpha = np.arccos(np.clip(self.radius / rho, -1.0, 1.0))
        left_angle = beta - alpha
        right_angle = beta + alpha
        left_theta = wrap(self.radius * left_angle, self.perimeter)
        right_theta = wrap(self.radius * right_angle, self.perimeter)
        left = self.center + self.radius * np.column_stack([np.cos(left_angle), np.sin(left_angle)])
        right = self.center + self.radius * np.column_stack(
            [np.cos(right_angle), np.sin(right_angle)]
        )
        return left, right, left_theta, right_theta

    def _blocked(self, a, b):
        d = b - a
        dd = np.einsum('ij,ij->i', d, d)
        rel = self.center - a
        with np.errstate(invalid='ignore', divide='ignore'):
            t = np.where(dd > 0, np.einsum('ij,ij->i', rel, d) / dd, 0.0)
        t = np.clip(t, 0.0, 1.0)
        closest = a + t[:, None] * d
        gap = np.hypot(*(self.center - closest).T)
        return gap < self.radius - self.tol

    def to_dict(self) -> dict:
        return {
            'type': 'disk',
            'center': [self.center_point.x, self.center_point.y],
            'radius': self.radius,
        }


@dataclass(frozen=True)
class PolygonObstacle(ConvexObstacle):
    kind: ClassVar[str] = 'polygon'

    vertices: tuple[Point, ...]
    tol: float = DEFAULT_TOL
    _v: np.ndarray = field(init=False, repr=False, compare=False)
    _edges: np.ndarray = field(init=False, repr=False, compare=False)
    _lengths: np.ndarray = field(init=False, repr=False, compare=False)
    _starts: np.ndarray = field(init=False, repr=False, compare=False)
    _normals: np.ndarray = field(init=False, repr=False, compare=False)
    _offsets: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        v = as_points(self.vertices)
        if len(v) < 3:
            raise GeometryError(f'polygon needs at least 3 vertices, got {len(v)}')

        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        if np.any(lengths == 0):
            idx = int(np.flatnonzero(lengths == 0)[0])
            raise GeometryError(f'polygon vertex {idx} is repeated')

        turn = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(
            edges, -1, axis=0
        )[:, 0]
        if np.any(turn <= 0):
            idx = (int(np.flatnonzero(turn <= 0)[0]) + 1) % len(v)
            raise GeometryError(
                f'polygon must be strictly convex and counterclockwise; vertex {idx} fails'
            )

        normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lengths[:, None]
        object.__setattr__(self, '_v', v)
        object.__setattr__(self, '_edges', edges)
        object.__setattr__(self, '_lengths', lengths)
        object.__setattr__(self, '_starts', np.concatenate([[0.0], np.cumsum(lengths)[:-1]]))
        object.__setattr__(self, '_normals', normals)
        object.__setattr__(self, '_offsets', np.einsum('ij,ij->i', normals, v))

    @property
    def perimeter(self) -> float:
        return float(self._lengths.sum())

    @property
    def center(self) -> np.ndarray:
        return self._v.mean(axis=0)

    @property
    def radius_bound(self) -> float:
        return float(np.hypot(*(self._v - self.center).T).max())

    def interior_mask(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points)
        slack = pts @ self._normals.T - self._offsets
        return slack.max(axis=1) < -self.tol

    def _project(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pts = as_points(points)
        rel = pts[:, None, :] - self._v[None, :, :]
        t = np.einsum('nkj,kj->nk', rel, self._edges) / self._lengths**2
        t = np.clip(t, 0.0, 1.0)
        foot = self._v[None, :, :] + t[:, :, None] * self._edges[None, :, :]
        dist = np.hypot(*(pts[:, None, :] - foot).transpose(2, 0, 1))
        k = np.argmin(dist, axis=1)
        rows = np.arange(len(pts))
        return dist[rows, k], k, t[rows, k]

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        dist, _, _ = self._project(points)
        return dist

    def boundary_params(self, points: np.ndarray) -> np.ndarray:
        _, k, t = self._project(points)
        return wrap(self._starts[k] + t * self._lengths[k], self.perimeter)

    def boundary_points(self, theta: np.ndarray) -> np.ndarray:
        theta = wrap(theta, self.perimeter)
        k = np.clip(np.searchsorted(self._starts, theta, side='right') - 1, 0, len(self._v) - 1)
        frac = (theta - self._starts[k]) / self._lengths[k]
        return self._v[k] + frac[:, None] * self._edges[k]

    def _tangents_outside(self, points):
        pts = as_points(points)
        towards = self.center - pts
        rel = self._v[None, :, :] - pts[:, None, :]
        cross = towards[:, None, 0] * rel[:, :, 1] - towards[:, None, 1] * rel[:, :, 0]
        dot = np.einsum('nj,nkj->nk', towards, rel)
        angle = np.arctan2(cross, dot)
        reach = np.hypot(rel[:, :, 0], rel[:, :, 1])

        # NOTE: vertices collinear with the point tie on angle; take the nearest one
        left_mask = angle >= angle.max(axis=1, keepdims=True) - 1e-12
        right_mask = angle <= angle.min(axis=1, keepdims=True) + 1e-12
        left_k = np.argmin(np.where(left_mask, reach, np.inf), axis=1)
        right_k = np.argmin(np.where(right_mask, reach, np.inf), axis=1)
        return (
            self._v[left_k],
            self._v[right_k],
            self._starts[left_k].copy(),
            self._starts[right_k].copy(),
        )

    def _blocked(self, a, b):
        d = b - a
        num = self._offsets[None, :] - self.tol - a @ self._normals.T
        den = d @ self._normals.T
        with np.errstate(invalid='ignore', divide='ignore'):
            ratio = num / den
        lower = np.where(den < 0, ratio, -np.inf).max(axis=1)
        upper = np.where(den > 0, ratio, np.inf).min(axis=1)
        parallel_outside = np.any((den == 0) & (num <= 0), axis=1)
        lo = np.maximum(lower, 0.0)
        hi = np.minimum(upper, 1.0)
        return (lo < hi) & ~parallel_outside

    def to_dict(self) -> dict:
        return {'type': 'polygon', 'vertices': [[p.x, p.y] for p in self.vertices]}


def scene_diameter(obstacle: ConvexObstacle, *point_sets: np.ndarray) -> float:
    """Diameter of the bounding box holding the obstacle and every point set."""
    c = obstacle.center
    r = obstacle.radius_bound
    lo = c - r
    hi = c + r
    for pts in point_sets:
        pts = as_points(pts)
        if len(pts):
            lo = np.minimum(lo, pts.min(axis=0))
            hi = np.maximum(hi, pts.max(axis=0))
    return float(np.hypot(*(hi - lo)))


def obstacle_from_dict(data: dict) -> ConvexObstacle:
    match data.get('type'):
        case 'disk':
            return DiskObstacle(center_point=Point.of(data['center']), radius=float(data['radius']))
        case 'polygon':
            return PolygonObstacle(vertices=tuple(Point.of(v) for v in data['vertices']))
        case other:
            raise GeometryError(f'unknown obstacle type {other!r}; expected "disk" or "polygon"')
