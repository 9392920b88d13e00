import math

import numpy as np
import pytest

from core.errors import GeometryError
from core.measures.discrete_measure import DiscreteMeasure
from core.transport.cost import cost_matrix
from tests.transport.transport_setup import TestTransport


class TestCost(TestTransport):
    def test_wrapping_pair(self):
        mu = DiscreteMeasure.uniform(np.array([[-2.0, 0.0]]))
        nu = DiscreteMeasure.uniform(np.array([[2.0, 0.0], [2.0, 3.0]]))
        cost = cost_matrix(mu, nu, self.disk)
        assert cost.shape == (1, 2)
        assert cost[0, 0] == pytest.approx(2 * math.sqrt(3) + math.pi / 3, abs=1e-9)
        assert cost[0, 1] == pytest.approx(math.hypot(4.0, 3.0), abs=1e-12)

    def test_never_below_euclidean(self):
        mu, nu, cost = self.random_instance(6, 3)
        diff = mu.atoms[:, None, :] - nu.atoms[None, :, :]
        assert np.all(cost >= np.hypot(diff[..., 0], diff[..., 1]) - 1e-12)

    def test_inadmissible_atom(self):
        mu = DiscreteMeasure.uniform(np.array([[3.0, 0.0], [0.1, 0.0]]))
        nu = DiscreteMeasure.uniform(np.array([[2.0, 0.0]]))
        with pytest.raises(GeometryError, match='mu atom 1'):
            cost_matrix(mu, nu, self.disk)
