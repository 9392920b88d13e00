import numpy as np
import pytest

from core.geometry.geodesic import pairwise_lengths
from core.geometry.obstacle import DiskObstacle
from core.point import Point
from core.rays.relation import (
    NodeKind,
    build_nodes,
    c_transform,
    check_closure,
    check_partial_order,
    closure_in_G,
    gamma_prime_closure,
)
from tests.rays.rays_setup import TestRays


class TestRelation(TestRays):
    def test_node_universe(self):
        assert len(self.plan) == 4
        assert len(self.nodes) == 4 + 4 + 4 * 8
        assert self.nodes.mask(NodeKind.SAMPLE).sum() == 32

    def test_samples_sit_on_their_geodesic(self):
        samples = np.flatnonzero(self.nodes.mask(NodeKind.SAMPLE))
        for k in samples:
            path = self.nodes.path_of(int(k))
            assert 0 < self.nodes.offset[k] < path.total_length
            assert self.nodes.remaining(int(k)) > 0

    def test_c_transform_recovers_duals(self):
        phi = self.rel.phi
        src = self.nodes.mask(NodeKind.SOURCE)
        tgt = self.nodes.mask(NodeKind.TARGET)
        assert np.allclose(phi[src], self.pot.phi[self.nodes.atom[src]], atol=1e-9)
        assert np.allclose(phi[tgt], -self.pot.psi[self.nodes.atom[tgt]], atol=1e-9)

    def test_c_transform_at_a_free_point(self):
        p = np.array([[0.0, 5.0]])
        value = c_transform(p, self.nu, self.pot, self.obstacle)
        assert value.shape == (1,)
        expected = (pairwise_lengths(self.obstacle, p, self.nu.atoms) - self.pot.psi).min()
        assert value[0] == pytest.approx(expected, abs=1e-12)

    def test_plan_pairs_lie_in_G(self):
        for i, j, _ in self.plan.couplings():
            u = self.nodes.index_of(NodeKind.SOURCE, i)
            v = self.nodes.index_of(NodeKind.TARGET, j)
            assert self.rel.G[u, v]
            assert not self.rel.G[v, u]

    def test_samples_follow_their_source(self):
        for k in np.flatnonzero(self.nodes.mask(NodeKind.SAMPLE)):
            g = int(self.nodes.geodesic[k])
            u = self.nodes.index_of(NodeKind.SOURCE, int(self.plan.rows[g]))
            assert self.rel.G[u, k]

    def test_diagonal_on_rays(self):
        on_ray = self.rel.strict.any(axis=0) | self.rel.strict.any(axis=1)
        assert np.all(np.diag(self.rel.G)[on_ray])
        assert np.array_equal(self.rel.R, self.rel.R.T)

    def test_partial_order(self):
        report = check_partial_order(self.rel, self.obstacle, self.config.check_tol)
        assert report.ok
        assert report.reflexive_violations == 0

    def test_plan_closure_lies_in_G(self):
        report = check_closure(
            self.plan, self.mu, self.nu, self.pot, self.obstacle, 2, self.config.check_tol
        )
        assert report.ok
        assert report.pairs >= len(self.plan)

    def test_collinear_closure(self):
        far = DiskObstacle(center_point=Point(100.0, 100.0), radius=1.0)
        gamma = [(Point(0, 0), Point(1, 0)), (Point(1, 0), Point(2, 0))]
        closure = gamma_prime_closure(gamma, far, max_chain=2)
        assert (Point(0.0, 0.0), Point(2.0, 0.0)) in closure
        assert (Point(1.0, 0.0), Point(1.0, 0.0)) in closure
        assert len(closure) == 4

    def test_closure_flags_pairs_off_the_potential(self):
        closure = [(self.mu.atom(0), self.nu.atom(j)) for j in range(len(self.nu))]
        outside = closure_in_G(closure, self.nu, self.pot, self.obstacle, self.config.check_tol)
        slack = self.cost[0] - self.pot.phi[0] - self.pot.psi
        expected = np.flatnonzero(slack > self.config.check_tol).tolist()
        assert expected
        assert outside == expected
        partner = int(self.plan.cols[self.plan.rows == 0][0])
        assert partner not in outside

    def test_closure_flags_reversed_plan_pairs(self):
        forward = [(self.mu.atom(i), self.nu.atom(j)) for i, j, _ in self.plan.couplings()]
        backward = [(y, x) for x, y in forward]
        fixed = [(x, x) for x, _ in forward]
        closure = forward + fixed + backward
        outside = closure_in_G(closure, self.nu, self.pot, self.obstacle, self.config.check_tol)
        start = len(forward) + len(fixed)
        assert outside == list(range(start, start + len(backward)))

    @pytest.mark.parametrize('samples', [0, 3])
    def test_sample_count_is_configurable(self, samples):
        nodes = build_nodes(self.mu, self.nu, self.plan, self.obstacle, samples)
        assert len(nodes) == 8 + 4 * samples
