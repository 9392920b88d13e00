import numpy as np
import pytest

from core.errors import TransportError
from core.measures.step_cdf import build_cdf, quantile
from tests.measures.measures_setup import TestMeasures


class TestStepCDF(TestMeasures):
    def test_cdf_merges_equal_values(self):
        cdf = build_cdf([0.5, 0.1, 0.5], [0.25, 0.5, 0.25])
        assert cdf.breakpoints.tolist() == [0.1, 0.5]
        assert cdf.cumulative.tolist() == pytest.approx([0.5, 1.0])

    def test_cdf_is_right_continuous(self):
        cdf = build_cdf([0.1, 0.4], [0.5, 0.5])
        assert cdf(0.0) == 0.0
        assert cdf(0.1) == 0.5
        assert cdf(0.3) == 0.5
        assert cdf(0.4) == 1.0

    def test_quantile_is_left_inverse(self):
        cdf = build_cdf([0.1, 0.4, 0.9], [0.25, 0.25, 0.5])
        assert quantile(cdf, 0.0) == 0.1
        assert quantile(cdf, 0.25) == 0.1
        assert quantile(cdf, 0.26) == 0.4
        assert quantile(cdf, 1.0) == 0.9

    def test_quantile_rejects_bad_level(self):
        cdf = build_cdf([0.1], [1.0])
        with pytest.raises(TransportError, match='outside'):
            quantile(cdf, 1.5)

    def test_negative_weight(self):
        with pytest.raises(TransportError, match='negative'):
            build_cdf([0.1, 0.2], [1.5, -0.5])

    def test_mass_must_reach_one(self):
        with pytest.raises(TransportError, match='expected 1'):
            build_cdf([0.1, 0.2], [0.25, 0.25])

    def test_quantile_is_monotone(self):
        rng = np.random.default_rng(5)
        cdf = build_cdf(rng.normal(size=60), rng.dirichlet(np.ones(60)))
        levels = np.linspace(0.0, 1.0, 1000)
        values = np.array([quantile(cdf, float(q)) for q in levels])
        assert np.all(np.diff(values) >= 0)
        assert values[0] == cdf.breakpoints[0]
        assert values[-1] == cdf.breakpoints[-1]

    @pytest.mark.parametrize('n', [1, 2, 7, 50])
    def test_midpoint_levels_hit_order_statistics(self, n):
        rng = np.random.default_rng(n)
        values = rng.uniform(-3.0, 3.0, size=n)
        cdf = build_cdf(values, np.full(n, 1.0 / n))
        ordered = np.sort(values)
        for k in range(1, n + 1):
            assert quantile(cdf, (k - 0.5) / n) == ordered[k - 1]
