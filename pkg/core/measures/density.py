import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from core.errors import GeometryError
from core.geometry.obstacle import ConvexObstacle
from core.measures.discrete_measure import DiscreteMeasure

logger = logging.getLogger(__name__)

Profile = Literal['uniform', 'radial-linear']
PROFILES = ('uniform', 'radial-linear')

BATCH = 1024
MAX_DRAWS_PER_ATOM = 10_000


@dataclass(frozen=True)
class Rectangle:
    lo: tuple[float, float]
    hi: tuple[float, float]

    def __post_init__(self) -> None:
        if not (self.lo[0] < self.hi[0] and self.lo[1] < self.hi[1]):
            raise GeometryError(f'rectangle min {self.lo} must be below max {self.hi}')

    def bounds(self, obstacle: ConvexObstacle) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.lo, dtype=float), np.asarray(self.hi, dtype=float)

    def reference(self, obstacle: ConvexObstacle) -> np.ndarray:
        return (np.asarray(self.lo) + np.asarray(self.hi)) / 2.0

    def contains(self, pts: np.ndarray, obstacle: ConvexObstacle) -> np.ndarray:
        lo, hi = self.bounds(obstacle)
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def corners(self) -> np.ndarray:
        (x0, y0), (x1, y1) = self.lo, self.hi
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)

    def to_dict(self) -> dict:
        return {'type': 'rectangle', 'min': list(self.lo), 'max': list(self.hi)}


@dataclass(frozen=True)
class Annulus:
    """Ring centred on the obstacle's reference center."""

    inner_radius: float
    outer_radius: float

    def __post_init__(self) -> None:
        if not (0 <= self.inner_radius < self.outer_radius):
            raise GeometryError(
                f'annulus radii must satisfy 0 <= inner < outer, '
                f'got {self.inner_radius} and {self.outer_radius}'
            )

    def bounds(self, obstacle: ConvexObstacle) -> tuple[np.ndarray, np.ndarray]:
        return obstacle.center - self.outer_radius, obstacle.center + self.outer_radius

    def reference(self, obstacle: ConvexObstacle) -> np.ndarray:
        return obstacle.center

    def contains(self, pts: np.ndarray, obstacle: ConvexObstacle) -> np.ndarray:
        rho = np.hypot(*(pts - obstacle.center).T)
        return (rho >= self.inner_radius) & (rho <= self.outer_radius)

    def to_dict(self) -> dict:
        return {
            'type': 'annulus',
            'inner_radius': self.inner_radius,
            'outer_radius': self.outer_radius,
        }


Region = Rectangle | Annulus


@dataclass(frozen=True)
class DensitySpec:
    region: Region
    profile: Profile
    n: int
    seed: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GeometryError(f'density atom count must be at least 1, got {self.n}')
        if self.profile not in PROFILES:
            raise GeometryError(f'unknown density profile {self.profile!r}; expected {PROFILES}')

    def to_dict(self) -> dict:
        return {
            'region': self.region.to_dict(),
            'profile': self.profile,
            'n': self.n,
            'seed': self.seed,
        }


def _region_hidden(spec: DensitySpec, obstacle: ConvexObstacle) -> bool:
    match spec.region:
        case Rectangle():
            # a convex obstacle holding all four corners holds the whole rectangle
            return bool(obstacle.interior_mask(spec.region.corners()).all())
        case Annulus(outer_radius=outer):
            ring = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)
            probe = obstacle.center + outer * np.column_stack([np.cos(ring), np.sin(ring)])
            return bool(obstacle.interior_mask(probe).all())
    return False


def sample_density(spec: DensitySpec, obstacle: ConvexObstacle) -> DiscreteMeasure:
    """Draw ``spec.n`` equal-weight atoms by rejection sampling outside the obstacle."""
    if _region_hidden(spec, obstacle):
        raise GeometryError(f'density region {spec.region.to_dict()} lies inside the obstacle')

    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.region.bounds(obstacle)
    ref = spec.region.reference(obstacle)
    reach = float(np.hypot(*np.maximum(np.abs(lo - ref), np.abs(hi - ref))))

    accepted: list[np.ndarray] = []
    count = 0
    draws = 0
    cap = MAX_DRAWS_PER_ATOM * spec.n
    while count < spec.n:
        if draws >= cap:
            raise GeometryError(
                f'only {count} of {spec.n} atoms accepted after {draws} draws; '
                f'region {spec.region.to_dict()} is (almost) covered by the obstacle'
            )
        pts = rng.uniform(lo, hi, size=(BATCH, 2))
        u = rng.uniform(0.0, 1.0, size=BATCH)
        draws += BATCH

        keep = spec.region.contains(pts, obstacle) & ~obstacle.interior_mask(pts)
        if spec.profile == 'radial-linear':
            keep &= u * reach <= np.hypot(*(pts - ref).T)
        pts = pts[keep]
        accepted.append(pts)
        count += len(pts)

    atoms = np.concatenate(accepted)[: spec.n]
    logger.debug('sampled %d atoms from %d draws (seed %d)', spec.n, draws, spec.seed)
    return DiscreteMeasure.uniform(atoms)
