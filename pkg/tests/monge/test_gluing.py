import numpy as np
import pytest

from core.errors import TransportError
from core.monge.gluing import FIXED, build_class_maps, glue_maps
from core.runner import run_pipeline
from tests.monge.monge_setup import TestMonge


class TestGluing(TestMonge):
    def setup_method(self, method):
        super().setup_method(method)
        problem, config = self.problem('wrap.json')
        self.result = run_pipeline(problem, config)

    def test_glued_map_is_a_bijection(self):
        monge = self.result.monge
        assert len(monge) == 4
        assert sorted(monge.assignment.tolist()) == [0, 1, 2, 3]
        assert not np.any(monge.provenance == FIXED)

    def test_provenance_names_the_class(self):
        monge = self.result.monge
        for label, pairs in self.result.class_maps.items():
            for i, j in pairs.items():
                assert monge.assignment[i] == j
                assert monge.provenance[i] == label

    def test_images(self):
        monge = self.result.monge
        assert np.array_equal(monge.images(self.result.nu), self.result.nu.atoms[monge.assignment])

    def test_rebuild_class_maps(self):
        r = self.result
        assert build_class_maps(r.classes, r.mu, r.nu) == r.class_maps

    def test_unassigned_atoms(self):
        r = self.result
        with pytest.raises(TransportError, match='4 source atoms left unassigned'):
            glue_maps({}, r.mu, r.nu, r.nodes)

    def test_double_assignment(self):
        r = self.result
        with pytest.raises(TransportError, match='assigned by two classes'):
            glue_maps({0: {0: 0}, 1: {0: 1}}, r.mu, r.nu, r.nodes)

    def test_collision(self):
        r = self.result
        with pytest.raises(TransportError, match='same target'):
            glue_maps({0: {0: 0, 1: 0, 2: 2, 3: 3}}, r.mu, r.nu, r.nodes)

    def test_identity_is_all_fixed_points(self):
        problem, config = self.problem('identity.json')
        result = run_pipeline(problem, config)
        assert result.classes == []
        assert result.monge.assignment.tolist() == [0, 1, 2]
        assert np.all(result.monge.provenance == FIXED)
        assert result.report.cost_map == 0.0
