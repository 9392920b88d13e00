import numpy as np
import pytest

from core.errors import TransportError
from core.measures.discrete_measure import DiscreteMeasure
from core.monge.class_maps import (
    class_map,
    hourglass_violations,
    monotone_map_on_class,
    quotient_violations,
    straight_class_map,
)
from tests.monge.monge_setup import TestMonge, boundary_class, straight_class, uniform_measure


class TestClassMaps(TestMonge):
    def test_monotone_map_follows_contact_order(self):
        cls = boundary_class([(0.4, -1.0), (0.1, -1.0)], [(0.9, 1.0), (0.5, 1.0)])
        assert monotone_map_on_class(cls, self.mu2, self.nu2) == {1: 1, 0: 0}

    def test_ties_broken_by_offset(self):
        cls = boundary_class([(0.0, -2.0), (0.0, -1.0)], [(1.0, 1.0), (1.0, 3.0)])
        assert monotone_map_on_class(cls, self.mu2, self.nu2) == {0: 0, 1: 1}

    def test_straight_map_interleaved(self):
        cls = straight_class([2.0, 0.0], [3.0, 1.0])
        assert straight_class_map(cls, self.mu2, self.nu2) == {1: 1, 0: 0}

    def test_dispatch_by_kind(self):
        boundary = boundary_class([(0.1, -1.0), (0.4, -1.0)], [(0.5, 1.0), (0.9, 1.0)])
        straight = straight_class([0.0, 2.0], [1.0, 3.0])
        assert class_map(boundary, self.mu2, self.nu2) == {0: 0, 1: 1}
        assert class_map(straight, self.mu2, self.nu2) == {0: 0, 1: 1}

    def test_wrong_kind(self):
        straight = straight_class([0.0], [1.0])
        with pytest.raises(TransportError, match='not a boundary class'):
            monotone_map_on_class(straight, self.mu2, self.nu2)
        boundary = boundary_class([(0.1, -1.0)], [(0.5, 1.0)])
        with pytest.raises(TransportError, match='not a straight class'):
            straight_class_map(boundary, self.mu2, self.nu2)

    def test_class_mass_mismatch(self):
        nu = DiscreteMeasure(self.nu2.atoms, np.array([0.75, 0.25]))
        cls = boundary_class([(0.1, -1.0)], [(0.5, 1.0)])
        with pytest.raises(TransportError, match='source mass'):
            monotone_map_on_class(cls, self.mu2, nu)

    def test_class_count_mismatch(self):
        mu = uniform_measure(4, -3.0)
        cls = boundary_class([(0.1, -1.0), (0.2, -1.0)], [(0.5, 1.0)])
        with pytest.raises(TransportError, match='2 sources and 1 targets'):
            monotone_map_on_class(cls, mu, self.nu2)

    def test_quotient_check(self):
        good = boundary_class([(0.1, -1.0), (0.4, -1.0)], [(0.5, 1.0), (0.9, 1.0)])
        assert quotient_violations(good, self.mu2, self.nu2) == 0
        bad = boundary_class([(0.1, -1.0), (0.8, -1.0)], [(0.5, 1.0), (0.6, 1.0)])
        assert quotient_violations(bad, self.mu2, self.nu2) == 1

    def test_quotient_skips_straight(self):
        assert quotient_violations(straight_class([0.0], [1.0]), self.mu2, self.nu2) == 0

    def test_hourglass_check(self):
        cls = boundary_class([(0.1, -1.0), (0.8, -1.0)], [(0.5, 1.0), (0.6, 1.0)])
        assert hourglass_violations(cls, {0: 0, 1: 1}) == 1
        assert hourglass_violations(cls, {0: 1, 1: 0}) == 1
        ok = boundary_class([(0.1, -1.0), (0.4, -1.0)], [(0.5, 1.0), (0.9, 1.0)])
        assert hourglass_violations(ok, {0: 0, 1: 1}) == 0
