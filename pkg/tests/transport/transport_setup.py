import itertools

import numpy as np

from core.geometry.obstacle import DiskObstacle
from core.measures.density import Annulus, DensitySpec, sample_density
from core.measures.discrete_measure import DiscreteMeasure
from core.point import Point
from core.transport.cost import cost_matrix


def brute_force_cost(cost: np.ndarray) -> float:
    """Cheapest permutation for uniform weights; optimal plans include one by Birkhoff."""
    n = cost.shape[0]
    perms = np.array(list(itertools.permutations(range(n))))
    return float(cost[np.arange(n), perms].sum(axis=1).min()) / n


class TestTransport:
    def setup_method(self, method):
        self.disk = DiskObstacle(center_point=Point(0.0, 0.0), radius=1.0)
        self.far_disk = DiskObstacle(center_point=Point(100.0, 100.0), radius=1.0)
        self.ring = Annulus(1.2, 4.0)

    def random_instance(self, n: int, seed: int):
        mu = sample_density(DensitySpec(self.ring, 'uniform', n, seed), self.disk)
        nu = sample_density(DensitySpec(self.ring, 'uniform', n, seed + 500), self.disk)
        return mu, nu, cost_matrix(mu, nu, self.disk)

    def weighted(self, atoms, weights) -> DiscreteMeasure:
        return DiscreteMeasure(np.asarray(atoms, dtype=float), np.asarray(weights, dtype=float))
