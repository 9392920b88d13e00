"""Per-class geometry: the boundary arc a chain class runs along and the order keys of its atoms.

A boundary class has an oriented arc ``[theta_z, theta_w]`` covering every
contact of its geodesics. Each atom gets a key ``(t, s)``: ``t`` is the
normalized position of its contact along that arc and ``s`` the signed arc
length from the contact along its own geodesic. Straight classes key atoms
by their position along a common line.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from core.errors import TransportError
from core.geometry.geodesic import GeodesicPath
from core.geometry.obstacle import ConvexObstacle, wrap
from core.rays.chains import ChainPartition
from core.rays.relation import NodeKind, RayNodes

logger = logging.getLogger(__name__)


class ClassKind(Enum):
    STRAIGHT = 'straight'
    BOUNDARY = 'boundary'


class Side(Enum):
    SOURCE = 'source'
    TARGET = 'target'


@dataclass(frozen=True)
class BoundaryInterval:
    theta_start: float
    length: float
    clockwise: bool
    perimeter: float
    tol: float = 1e-9

    @property
    def theta_end(self) -> float:
        step = -self.length if self.clockwise else self.length
        return float(wrap(self.theta_start + step, self.perimeter))

    def unwrap(self, theta: float) -> float:
        """Distance travelled along the arc from ``theta_start`` to ``theta``."""
        rel = (self.theta_start - theta) if self.clockwise else (theta - self.theta_start)
        rel = float(wrap(rel, self.perimeter))
        # a contact a rounding error before the start belongs to the start
        return 0.0 if rel > self.perimeter - self.tol else rel


@dataclass(frozen=True)
class Member:
    atom: int
    side: Side
    key: tuple[float, float]
    geodesic: int


@dataclass
class ClassDecomposition:
    label: int
    kind: ClassKind
    geodesics: list[int]
    members: list[Member] = field(default_factory=list)
    interval: BoundaryInterval | None = None
    line: tuple[np.ndarray, np.ndarray] | None = None
    parent: int | None = None

    def side(self, side: Side) -> list[Member]:
        return [m for m in self.members if m.side is side]

    def summary(self) -> dict:
        out = {
            'label': self.label,
            'kind': self.kind.value,
            'geodesics': len(self.geodesics),
            'sources': len(self.side(Side.SOURCE)),
            'targets': len(self.side(Side.TARGET)),
        }
        if self.interval is not None:
            out['theta_z'] = self.interval.theta_start
            out['theta_w'] = self.interval.theta_end
            out['clockwise'] = self.interval.clockwise
        if self.parent is not None:
            out['split_from'] = self.parent
        return out


def geodesic_classes(nodes: RayNodes, partition: ChainPartition) -> np.ndarray:
    """Chain class of each plan geodesic; -1 for fixed points, fresh labels for unsampled rays."""
    labels = np.full(len(nodes.paths), -1)
    samples = np.flatnonzero(nodes.mask(NodeKind.SAMPLE) & (partition.class_id >= 0))
    for node in samples:
        g = int(nodes.geodesic[node])
        if labels[g] < 0:
            labels[g] = partition.class_id[node]

    fresh = max(partition.classes, default=-1) + 1
    for g, path in enumerate(nodes.paths):
        if labels[g] < 0 and path.total_length > 0:
            labels[g] = fresh
            fresh += 1
    return labels


def class_boundary_curve(
    paths: list[GeodesicPath], obstacle: ConvexObstacle
) -> BoundaryInterval | None:
    """Shortest oriented arc holding every boundary contact of ``paths``; None when straight."""
    contacts = [c for c in (p.boundary_contact() for p in paths) if c is not None]
    if not contacts:
        return None

    turns = {c.clockwise for c in contacts if c.clockwise is not None}
    if len(turns) > 1:
        raise TransportError('class geodesics wrap the obstacle in both directions')
    clockwise = turns.pop() if turns else False

    period = obstacle.perimeter
    sign = -1.0 if clockwise else 1.0
    entries = np.array([float(wrap(sign * c.entry_theta, period)) for c in contacts])
    arcs = np.array([c.arc_length for c in contacts])

    best_span, best_k = np.inf, 0
    for k in np.argsort(entries, kind='stable'):
        rel = wrap(entries - entries[k], period)
        rel = np.where(rel > period - obstacle.tol, 0.0, rel)
        span = float(np.max(rel + arcs))
        if span < best_span - obstacle.tol:
            best_span, best_k = span, int(k)

    if best_span >= period - obstacle.tol:
        raise TransportError(
            f'class contacts cover {best_span:.6g} of a boundary of length {period:.6g}'
        )
    return BoundaryInterval(
        theta_start=contacts[best_k].entry_theta,
        length=best_span,
        clockwise=clockwise,
        perimeter=period,
        tol=obstacle.tol,
    )


def contact_index(
    path: GeodesicPath, interval: BoundaryInterval, side: Side
) -> tuple[float, float]:
    contact = path.boundary_contact()
    if contact is None:
        raise TransportError('geodesic never touches the boundary of its boundary class')

    rel = interval.unwrap(contact.entry_theta)
    if side is Side.SOURCE:
        pos, s = rel, -contact.entry_offset
    else:
        pos, s = rel + contact.arc_length, path.total_length - contact.exit_offset
    t = pos / interval.length if interval.length > 0 else 0.0
    return float(min(max(t, 0.0), 1.0)), float(s)


def _line_of(path: GeodesicPath) -> tuple[np.ndarray, np.ndarray]:
    origin = path.start.as_array()
    direction = (path.end.as_array() - origin) / path.total_length
    return origin, direction


def _collinear(paths: list[GeodesicPath], tol: float) -> bool:
    origin, direction = _line_of(paths[0])
    for path in paths[1:]:
        _, other = _line_of(path)
        if float(direction @ other) < 1.0 - tol:
            return False
        for p in (path.start, path.end):
            rel = p.as_array() - origin
            if abs(direction[0] * rel[1] - direction[1] * rel[0]) > tol:
                return False
    return True


def _straight(
    label: int, geos: list[int], nodes: RayNodes, tol: float, parent: int | None = None
) -> list[ClassDecomposition]:
    paths = [nodes.paths[g] for g in geos]
    if len(geos) > 1 and not _collinear(paths, tol):
        logger.debug('straight class %d is not collinear; split per geodesic', label)
        return [
            cls
            for k, g in enumerate(geos)
            for cls in _straight(-1 - k, [g], nodes, tol, parent=label)
        ]

    origin, direction = _line_of(paths[0])
    plan = nodes.plan
    members = []
    for g, path in zip(geos, paths):
        src = float((path.start.as_array() - origin) @ direction)
        tgt = float((path.end.as_array() - origin) @ direction)
        members.append(Member(int(plan.rows[g]), Side.SOURCE, (0.0, src), g))
        members.append(Member(int(plan.cols[g]), Side.TARGET, (0.0, tgt), g))
    return [
        ClassDecomposition(
            label=label,
            kind=ClassKind.STRAIGHT,
            geodesics=list(geos),
            members=members,
            line=(origin, direction),
            parent=parent,
        )
    ]


def _check_permutation(nodes: RayNodes) -> None:
    plan = nodes.plan
    n, m = plan.shape
    rows_ok = len(np.unique(plan.rows)) == len(plan.rows) == n
    cols_ok = len(np.unique(plan.cols)) == len(plan.cols) == m
    if not (rows_ok and cols_ok):
        raise TransportError(
            'map construction needs a plan that pairs atoms one to one '
            f'(got {len(plan)} couplings for {n} sources and {m} targets)'
        )


def decompose_classes(
    nodes: RayNodes, partition: ChainPartition, obstacle: ConvexObstacle
) -> list[ClassDecomposition]:
    _check_permutation(nodes)
    labels = geodesic_classes(nodes, partition)
    plan = nodes.plan
    tol = obstacle.tol

    grouped: dict[int, list[int]] = {}
    for g, label in enumerate(labels):
        if label >= 0:
            grouped.setdefault(int(label), []).append(g)

    out: list[ClassDecomposition] = []
    for label in sorted(grouped):
        geos = grouped[label]
        paths = [nodes.paths[g] for g in geos]
        interval = class_boundary_curve(paths, obstacle)
        if interval is None:
            out.extend(_straight(label, geos, nodes, tol))
            continue

        members = []
        strays = []
        for g, path in zip(geos, paths):
            if path.boundary_contact() is None:
                strays.append(g)
                continue
            src_key = contact_index(path, interval, Side.SOURCE)
            tgt_key = contact_index(path, interval, Side.TARGET)
            members.append(Member(int(plan.rows[g]), Side.SOURCE, src_key, g))
            members.append(Member(int(plan.cols[g]), Side.TARGET, tgt_key, g))
        out.append(
            ClassDecomposition(
                label=label,
                kind=ClassKind.BOUNDARY,
                geodesics=[g for g in geos if g not in strays],
                members=members,
                interval=interval,
            )
        )
        if strays:
            logger.info('class %d: %d straight geodesics moved to own classes', label, len(strays))
            for g in strays:
                out.extend(_straight(-1, [g], nodes, tol, parent=label))

    # sub-classes were built with placeholder labels; number them after the chain classes
    fresh = max((c.label for c in out), default=-1) + 1
    for cls in out:
        if cls.label < 0:
            cls.label = fresh
            fresh += 1

    logger.info(
        '%d classes: %d along the boundary, %d straight',
        len(out),
        sum(c.kind is ClassKind.BOUNDARY for c in out),
        sum(c.kind is ClassKind.STRAIGHT for c in out),
    )
    return out
