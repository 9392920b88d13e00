import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    @classmethod
    def of(cls, xy: Sequence[float] | np.ndarray) -> 'Point':
        return cls(float(xy[0]), float(xy[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance(self, other: 'Point') -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def __iter__(self):
        yield self.x
        yield self.y


def as_points(points: Sequence[Point] | np.ndarray) -> np.ndarray:
    """Stack points into an (n, 2) float array."""
    if isinstance(points, np.ndarray):
        return np.asarray(points, dtype=float).reshape(-1, 2)
    rows = [[p.x, p.y] if isinstance(p, Point) else [float(p[0]), float(p[1])] for p in points]
    return np.array(rows, dtype=float).reshape(-1, 2)
