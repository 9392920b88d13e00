"""The ray relation G on a finite node universe.

Nodes are the source atoms, the target atoms and interior samples of every
plan geodesic. ``G`` holds ``(x, y)`` when the extended potential drops by
exactly ``d_M(x, y)`` from ``x`` to ``y``, plus the diagonal on the nodes that
lie on some nontrivial ray.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from core.geometry.geodesic import (
    GeodesicPath,
    geodesic,
    indexed_lengths,
    pairwise_lengths,
    path_point,
)
from core.geometry.obstacle import ConvexObstacle
from core.measures.discrete_measure import DiscreteMeasure
from core.point import Point, as_points
from core.transport.diagnostics import check_cyclical_monotonicity
from core.transport.solver import Potential, TransportPlan

logger = logging.getLogger(__name__)

PAIR_BATCH = 200_000


class NodeKind(Enum):
    SOURCE = 'source'
    TARGET = 'target'
    SAMPLE = 'sample'


@dataclass(frozen=True, eq=False)
class RayNodes:
    points: np.ndarray
    kinds: tuple[NodeKind, ...]
    atom: np.ndarray
    geodesic: np.ndarray
    offset: np.ndarray
    paths: tuple[GeodesicPath, ...]
    plan: TransportPlan
    samples_per_geodesic: int

    def __len__(self) -> int:
        return len(self.points)

    def mask(self, kind: NodeKind) -> np.ndarray:
        return np.array([k is kind for k in self.kinds], dtype=bool)

    def index_of(self, kind: NodeKind, atom: int) -> int:
        hits = np.flatnonzero(self.mask(kind) & (self.atom == atom))
        return int(hits[0])

    def point(self, node: int) -> Point:
        return Point.of(self.points[node])

    def path_of(self, node: int) -> GeodesicPath:
        return self.paths[int(self.geodesic[node])]

    def remaining(self, node: int) -> float:
        return self.path_of(node).total_length - float(self.offset[node])


def _heaviest(rows: np.ndarray, keys: np.ndarray, mass: np.ndarray, size: int) -> np.ndarray:
    """Coupling index of the heaviest coupling per row, ties broken by the lowest key."""
    best = np.full(size, -1)
    order = np.lexsort((keys, -mass))
    for k in order:
        if best[rows[k]] < 0:
            best[rows[k]] = k
    return best


def build_nodes(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: TransportPlan,
    obstacle: ConvexObstacle,
    samples_per_geodesic: int = 8,
) -> RayNodes:
    paths = tuple(
        geodesic(obstacle, mu.atom(int(i)), nu.atom(int(j))) for i, j in zip(plan.rows, plan.cols)
    )
    src_geo = _heaviest(plan.rows, plan.cols, plan.mass, len(mu))
    tgt_geo = _heaviest(plan.cols, plan.rows, plan.mass, len(nu))

    points = [mu.atoms, nu.atoms]
    kinds = [NodeKind.SOURCE] * len(mu) + [NodeKind.TARGET] * len(nu)
    atom = [np.arange(len(mu)), np.arange(len(nu))]
    geo = [src_geo, tgt_geo]
    offset = [np.zeros(len(mu)), np.array([paths[g].total_length for g in tgt_geo])]

    k = samples_per_geodesic
    for g, path in enumerate(paths):
        if k == 0 or path.total_length == 0:
            continue
        s = path.total_length * np.arange(1, k + 1) / (k + 1)
        points.append(as_points([path_point(path, float(v)) for v in s]))
        kinds.extend([NodeKind.SAMPLE] * k)
        atom.append(np.full(k, -1))
        geo.append(np.full(k, g))
        offset.append(s)

    nodes = RayNodes(
        points=np.concatenate(points),
        kinds=tuple(kinds),
        atom=np.concatenate(atom),
        geodesic=np.concatenate(geo),
        offset=np.concatenate(offset),
        paths=paths,
        plan=plan,
        samples_per_geodesic=k,
    )
    logger.info('%d ray nodes from %d plan geodesics', len(nodes), len(paths))
    return nodes


def c_transform(
    points, nu: DiscreteMeasure, pot: Potential, obstacle: ConvexObstacle
) -> np.ndarray:
    """Extend the source potential off the atoms: ``phi(p) = min_j d_M(p, y_j) - psi_j``."""
    dist = pairwise_lengths(obstacle, as_points(points), nu.atoms)
    return (dist - pot.psi[None, :]).min(axis=1)


@dataclass(frozen=True, eq=False)
class RayRelation:
    nodes: RayNodes
    phi: np.ndarray
    G: np.ndarray
    lengths: np.ndarray
    tol: float

    @property
    def strict(self) -> np.ndarray:
        return self.G & ~np.eye(len(self.phi), dtype=bool)

    @property
    def R(self) -> np.ndarray:
        return self.G | self.G.T

    def edges(self) -> np.ndarray:
        return np.argwhere(self.strict)


def build_G(
    nodes: RayNodes, phi: np.ndarray, obstacle: ConvexObstacle, tol: float
) -> RayRelation:
    pts = nodes.points
    n = len(pts)
    drop = phi[:, None] - phi[None, :]
    diff = pts[:, None, :] - pts[None, :, :]
    euclid = np.hypot(diff[..., 0], diff[..., 1])

    # d_M >= |x - y|, so only pairs whose potential drop reaches the chord can qualify
    cand = drop >= euclid - tol
    np.fill_diagonal(cand, False)
    rows, cols = np.nonzero(cand)

    lengths = np.full((n, n), np.nan)
    np.fill_diagonal(lengths, 0.0)
    for lo in range(0, len(rows), PAIR_BATCH):
        r, c = rows[lo : lo + PAIR_BATCH], cols[lo : lo + PAIR_BATCH]
        lengths[r, c] = indexed_lengths(obstacle, pts, pts, r, c)

    d = lengths[rows, cols]
    keep = (np.abs(drop[rows, cols] - d) <= tol) & (d > tol)
    G = np.zeros((n, n), dtype=bool)
    G[rows[keep], cols[keep]] = True

    on_ray = G.any(axis=0) | G.any(axis=1)
    G[np.flatnonzero(on_ray), np.flatnonzero(on_ray)] = True
    logger.info(
        'G: %d strict pairs among %d candidates, %d nodes on rays',
        int(keep.sum()),
        len(rows),
        int(on_ray.sum()),
    )
    return RayRelation(nodes=nodes, phi=phi, G=G, lengths=lengths, tol=tol)


@dataclass(frozen=True)
class PartialOrderReport:
    reflexive_violations: int
    antisymmetry_violations: int
    transitivity_violations: int
    transitivity_near_misses: int

    @property
    def ok(self) -> bool:
        return (
            self.reflexive_violations == 0
            and self.antisymmetry_violations == 0
            and self.transitivity_violations == 0
        )


def check_partial_order(
    rel: RayRelation, obstacle: ConvexObstacle, check_tol: float
) -> PartialOrderReport:
    strict = rel.strict
    n = len(rel.phi)
    on_ray = strict.any(axis=0) | strict.any(axis=1)
    reflexive = int(np.sum(on_ray & ~np.diag(rel.G)))

    both = strict & strict.T
    antisym = int(np.sum(np.triu(both & (rel.lengths > check_tol), k=1)))

    s = strict.astype(np.float32)
    composed = (s @ s) > 0
    missing = composed & ~rel.G & ~np.eye(n, dtype=bool)
    rows, cols = np.nonzero(missing)
    violations = 0
    if len(rows):
        d = indexed_lengths(obstacle, rel.nodes.points, rel.nodes.points, rows, cols)
        residual = np.abs(rel.phi[rows] - rel.phi[cols] - d)
        violations = int(np.sum(residual > check_tol))

    report = PartialOrderReport(reflexive, antisym, violations, len(rows) - violations)
    if not report.ok:
        logger.warning('G fails partial order checks: %s', report)
    return report


PairSet = list[tuple[Point, Point]]


def gamma_prime_closure(
    gamma: PairSet, obstacle: ConvexObstacle, max_chain: int = 2, tol: float = 1e-9
) -> PairSet:
    """Close ``gamma`` under zero-cost cycles of up to ``max_chain + 1`` pairs.

    A sequence ``(w_0, z_0), ..., (w_I, z_I)`` of pairs adds ``(w_0, z_I)`` when
    ``sum_i d(w_{i+1}, z_i) - d(w_i, z_i)`` vanishes with ``w_{I+1} = w_0``.
    """
    ws = as_points([w for w, _ in gamma])
    zs = as_points([z for _, z in gamma])
    dist = pairwise_lengths(obstacle, ws, zs)

    found: dict[tuple[int, int], None] = {(a, a): None for a in range(len(gamma))}
    for chain in range(1, max_chain + 1):
        for seq in itertools.product(range(len(gamma)), repeat=chain + 1):
            total = sum(dist[seq[i + 1], seq[i]] - dist[seq[i], seq[i]] for i in range(chain))
            total += dist[seq[0], seq[-1]] - dist[seq[-1], seq[-1]]
            if abs(total) <= tol:
                found.setdefault((seq[0], seq[-1]), None)

    closure = [(Point.of(ws[a]), Point.of(zs[b])) for a, b in found]
    logger.debug('closure grew %d pairs to %d', len(gamma), len(closure))
    return closure


def closure_in_G(
    closure: PairSet,
    nu: DiscreteMeasure,
    pot: Potential,
    obstacle: ConvexObstacle,
    tol: float,
) -> list[int]:
    """Indices of closure pairs on which the potential identity fails."""
    xs = as_points([x for x, _ in closure])
    ys = as_points([y for _, y in closure])
    drop = c_transform(xs, nu, pot, obstacle) - c_transform(ys, nu, pot, obstacle)
    d = indexed_lengths(obstacle, xs, ys, np.arange(len(xs)), np.arange(len(ys)))
    return [int(k) for k in np.flatnonzero(np.abs(drop - d) > tol)]


@dataclass(frozen=True)
class ClosureReport:
    pairs: int
    outside_G: list[int]
    cycle_violations: int

    @property
    def ok(self) -> bool:
        return not self.outside_G and self.cycle_violations == 0


def check_closure(
    plan: TransportPlan,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    pot: Potential,
    obstacle: ConvexObstacle,
    max_chain: int,
    check_tol: float,
    k_max: int = 4,
    n_samples: int = 1000,
    seed: int = 0,
) -> ClosureReport:
    """Close the plan support and check the closure against the potential and for cycles."""
    gamma = [(mu.atom(i), nu.atom(j)) for i, j, _ in plan.couplings()]
    closure = gamma_prime_closure(gamma, obstacle, max_chain, obstacle.tol)
    outside = closure_in_G(closure, nu, pot, obstacle, check_tol)
    cycles = check_cyclical_monotonicity(
        closure, obstacle, k_max=k_max, n_samples=n_samples, tol=check_tol, seed=seed
    )
    report = ClosureReport(pairs=len(closure), outside_G=outside, cycle_violations=len(cycles))
    if not report.ok:
        logger.warning('plan closure fails its checks: %s', report)
    return report
