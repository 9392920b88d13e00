import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from core.errors import GeometryError, TransportError
from core.geometry.obstacle import ConvexObstacle
from core.point import Point, as_points

logger = logging.getLogger(__name__)

MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        atoms = as_points(self.atoms)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(atoms) != len(weights):
            raise TransportError(f'{len(atoms)} atoms but {len(weights)} weights')
        if len(atoms) == 0:
            raise TransportError('a measure needs at least one atom')
        bad = ~((weights > 0) & np.isfinite(weights))
        if bad.any():
            idx = int(np.flatnonzero(bad)[0])
            raise TransportError(f'weight {idx} is {weights[idx]}; weights must be positive')
        if abs(weights.sum() - 1.0) > MASS_TOL:
            raise TransportError(f'weights sum to {weights.sum():.15g}, expected 1')
        object.__setattr__(self, 'atoms', atoms)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def uniform(cls, atoms) -> 'DiscreteMeasure':
        atoms = as_points(atoms)
        return cls(atoms, np.full(len(atoms), 1.0 / len(atoms)))

    def __len__(self) -> int:
        return len(self.weights)

    def atom(self, i: int) -> Point:
        return Point.of(self.atoms[i])

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def check_admissible(self, obstacle: ConvexObstacle, label: str = 'atom') -> None:
        obstacle.check_admissible(self.atoms, label)


def _merge(atoms: np.ndarray, weights: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Cluster atoms closer than ``tol`` to a representative, summing their weights."""
    order = np.lexsort((atoms[:, 1], atoms[:, 0]))
    reps: list[np.ndarray] = []
    mass: list[float] = []
    for i in order:
        if reps:
            d = np.hypot(*(np.asarray(reps) - atoms[i]).T)
            k = int(np.argmin(d))
            if d[k] <= tol:
                mass[k] += weights[i]
                continue
        reps.append(atoms[i])
        mass.append(float(weights[i]))
    return np.asarray(reps).reshape(-1, 2), np.asarray(mass)


def pushforward(
    m: DiscreteMeasure, mapping: Callable[[int], Point] | np.ndarray
) -> DiscreteMeasure:
    """Image measure; coincident images are merged with summed weights."""
    if callable(mapping):
        images = as_points([mapping(i) for i in range(len(m))])
    else:
        images = as_points(mapping)
    if len(images) != len(m):
        raise GeometryError(f'map defines {len(images)} images for {len(m)} atoms')

    atoms, inverse = np.unique(images, axis=0, return_inverse=True)
    weights = np.bincount(inverse.reshape(-1), weights=m.weights, minlength=len(atoms))
    return DiscreteMeasure(atoms, weights)


def exact_equal(m1: DiscreteMeasure, m2: DiscreteMeasure, tol: float) -> bool:
    a1, w1 = _merge(m1.atoms, m1.weights, tol)
    a2, w2 = _merge(m2.atoms, m2.weights, tol)
    if len(a1) != len(a2):
        return False

    used = np.zeros(len(a2), dtype=bool)
    for atom, weight in zip(a1, w1, strict=True):
        d = np.where(used, np.inf, np.hypot(*(a2 - atom).T))
        k = int(np.argmin(d))
        if d[k] > tol or abs(w2[k] - weight) > tol:
            return False
        used[k] = True
    return True
