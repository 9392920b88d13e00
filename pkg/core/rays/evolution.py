"""Moving nodes along their rays by a signed arc length."""

import logging
from dataclasses import dataclass, field

import numpy as np

from core.errors import GeometryError
from core.geometry.geodesic import geodesic_lengths, path_point
from core.geometry.obstacle import ConvexObstacle
from core.measures.discrete_measure import DiscreteMeasure
from core.point import as_points
from core.rays.relation import NodeKind, RayNodes

logger = logging.getLogger(__name__)


def evolvable(nodes: RayNodes, ids, t: float, tol: float) -> np.ndarray:
    ids = np.asarray(ids, dtype=int)
    target = nodes.offset[ids] + t
    total = np.array([nodes.path_of(int(i)).total_length for i in ids])
    return (target >= -tol) & (target <= total + tol)


def evolve(nodes: RayNodes, ids, t: float, tol: float = 1e-9) -> np.ndarray:
    """Positions of ``ids`` after moving ``t`` along their ray (backwards for ``t < 0``)."""
    ids = np.asarray(ids, dtype=int)
    ok = evolvable(nodes, ids, t, tol)
    if not ok.all():
        offenders = [int(i) for i in ids[~ok]]
        raise GeometryError(
            f'{len(offenders)} nodes have less than {abs(t):.6g} of ray left: {offenders[:10]}'
        )
    if t == 0:
        return nodes.points[ids].copy()
    paths = [nodes.path_of(int(i)) for i in ids]
    return as_points([path_point(p, float(s + t)) for p, s in zip(paths, nodes.offset[ids])])


@dataclass
class EvolutionStep:
    t: float
    evolvable_fraction: float
    mass_ratio: float
    injective: bool
    distance_violations: int
    betweenness_violations: int
    offenders: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.injective and self.distance_violations == 0 and self.betweenness_violations == 0
        )


def _node_mass(nodes: RayNodes, mu: DiscreteMeasure, ids: np.ndarray) -> np.ndarray:
    src = nodes.mask(NodeKind.SOURCE)[ids]
    mass = np.zeros(len(ids))
    mass[src] = mu.weights[nodes.atom[ids[src]]]
    return mass


def evolution_diagnostic(
    nodes: RayNodes,
    ids,
    times,
    obstacle: ConvexObstacle,
    mu: DiscreteMeasure,
    tol: float = 1e-9,
) -> list[EvolutionStep]:
    ids = np.asarray(ids, dtype=int)
    mass = _node_mass(nodes, mu, ids)
    steps = []
    if len(ids) == 0:
        return [EvolutionStep(float(t), 0.0, 1.0, True, 0, 0) for t in times]
    for t in times:
        ok = evolvable(nodes, ids, t, tol)
        moving = ids[ok]
        offenders = [int(i) for i in ids[~ok]]
        ratio = float(mass[ok].sum() / mass.sum()) if mass.sum() > 0 else float(ok.mean())

        if len(moving) == 0:
            steps.append(EvolutionStep(t, 0.0, ratio, True, 0, 0, offenders))
            continue

        start = nodes.points[moving]
        moved = evolve(nodes, moving, t, tol)

        # injective: no image is reached from two different starting positions
        images = np.unique(moved, axis=0)
        links = np.unique(np.hstack([moved, start]), axis=0)
        injective = len(links) == len(images)

        d = geodesic_lengths(obstacle, start, moved)
        distance_bad = int(np.sum(np.abs(d - abs(t)) > tol))

        # the moved point must stay between the ends of its ray
        heads = as_points([nodes.path_of(int(i)).start for i in moving])
        tails = as_points([nodes.path_of(int(i)).end for i in moving])
        first, second = (start, moved) if t >= 0 else (moved, start)
        total = geodesic_lengths(obstacle, heads, tails)
        legs = (
            geodesic_lengths(obstacle, heads, first)
            + geodesic_lengths(obstacle, first, second)
            + geodesic_lengths(obstacle, second, tails)
        )
        between_bad = int(np.sum(np.abs(legs - total) > tol))

        steps.append(
            EvolutionStep(
                t=float(t),
                evolvable_fraction=float(ok.mean()),
                mass_ratio=ratio,
                injective=injective,
                distance_violations=distance_bad,
                betweenness_violations=between_bad,
                offenders=offenders,
            )
        )
        logger.debug('evolution t=%g: %d/%d nodes move', t, len(moving), len(ids))
    return steps
