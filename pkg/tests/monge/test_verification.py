import numpy as np
import pytest

from core.monge.gluing import MongeMap
from core.monge.verification import verify_map
from core.runner import run_pipeline
from tests.monge.monge_setup import TestMonge


class TestVerification(TestMonge):
    def setup_method(self, method):
        super().setup_method(method)
        problem, config = self.problem('wrap.json')
        self.config = config
        self.result = run_pipeline(problem, config)

    def reverify(self, monge: MongeMap):
        r = self.result
        return verify_map(
            monge,
            r.mu,
            r.nu,
            r.plan,
            r.potential,
            r.relation,
            r.obstacle,
            r.cost,
            sets=r.sets,
            check_tol=self.config.check_tol,
        )

    def test_wrap_passes(self):
        report = self.result.report
        assert report.passed, report.failures()
        assert report.cost_gap == pytest.approx(0.0, abs=1e-9)
        assert report.pushforward_ok
        assert report.failures() == []

    def test_no_mass_on_wrong_endpoints(self):
        report = self.result.report
        assert report.mu_mass_on_final_points == 0.0
        assert report.nu_mass_on_initial_points == 0.0
        assert report.mu_mass_on_endpoints == pytest.approx(1.0)

    def test_class_summaries(self):
        report = self.result.report
        assert len(report.classes) == len(self.result.classes)
        assert all(c['hourglass_violations'] == 0 for c in report.classes)

    def test_swapped_map_fails(self):
        assignment = self.result.monge.assignment.copy()
        assignment[[0, 1]] = assignment[[1, 0]]
        report = self.reverify(MongeMap(assignment, self.result.monge.provenance))
        assert report.cost_gap > 0
        assert not report.cost_ok
        assert report.graph_in_G_violations > 0
        assert report.dual_identity_violations > 0
        assert report.pushforward_ok
        assert not report.passed

    def test_collapsed_map_breaks_pushforward(self):
        assignment = np.zeros(len(self.result.mu), dtype=int)
        report = self.reverify(MongeMap(assignment, self.result.monge.provenance))
        assert not report.pushforward_ok
        assert 'pushforward differs from nu' in report.failures()

    def test_report_dict(self):
        out = self.result.report.to_dict()
        assert out['passed'] is True
        assert set(out['tolerances']) == {'geometry', 'relation', 'check', 'hourglass'}
