import numpy as np
import pytest

from core.errors import ProblemError
from core.measures.density import Annulus, DensitySpec
from core.problem import parse_problem, parse_problem_text
from core.settings import PipelineConfig
from tests.cli.cli_setup import DENSITY, POLYGON, TestCli, problem_text


class TestProblemFile(TestCli):
    def test_atoms_problem(self):
        problem = parse_problem(self.wrap)
        mu, nu = problem.measures()
        assert problem.obstacle.kind == 'disk'
        assert len(mu) == len(nu) == 4
        assert np.allclose(mu.weights, 0.25)
        assert problem.config(PipelineConfig()).samples_per_geodesic == 8

    def test_polygon_problem(self):
        problem = parse_problem(POLYGON)
        assert problem.obstacle.kind == 'polygon'

    def test_density_problem(self):
        problem = parse_problem(DENSITY)
        assert isinstance(problem.nu, DensitySpec)
        assert isinstance(problem.nu.region, Annulus)
        assert problem.nu.profile == 'radial-linear'
        mu, nu = problem.measures()
        assert len(mu) == len(nu) == 40

    def test_density_defaults(self):
        region = {'type': 'annulus', 'inner_radius': 2, 'outer_radius': 3}
        body = {'density': {'region': region, 'n': 2}}
        problem = parse_problem_text(problem_text(nu=body))
        assert problem.nu.profile == 'uniform'
        assert problem.nu.seed == 0

    def test_dict_round_trip(self):
        problem = parse_problem(DENSITY)
        again = parse_problem_text(problem_text(**problem.to_dict()))
        assert again.to_dict() == problem.to_dict()

    def test_atom_inside_obstacle(self):
        text = problem_text(mu={'atoms': [[0, 0], [3, 3]]})
        with pytest.raises(ProblemError, match=r'mu\.atoms\[0\]'):
            parse_problem_text(text)

    def test_unknown_field(self):
        with pytest.raises(ProblemError, match=r"unknown field\(s\) \['colour'\]"):
            parse_problem_text(problem_text(colour='red'))

    def test_missing_field(self):
        text = problem_text()
        text = text[: text.index(', "nu"')] + '}'
        with pytest.raises(ProblemError, match=r"missing field\(s\) \['nu'\]"):
            parse_problem_text(text)

    def test_bad_weights(self):
        text = problem_text(mu={'atoms': [[-2, 0.5], [-3, -1]], 'weights': [0.5, 0.6]})
        with pytest.raises(ProblemError, match='mu: weights sum'):
            parse_problem_text(text)

    def test_bad_obstacle(self):
        with pytest.raises(ProblemError, match='obstacle.type'):
            parse_problem_text(problem_text(obstacle={'type': 'ellipse'}))
        disk = {'type': 'disk', 'center': [0, 0], 'radius': -1}
        with pytest.raises(ProblemError, match='obstacle'):
            parse_problem_text(problem_text(obstacle=disk))

    def test_density_missing_count(self):
        body = {'density': {'region': {'type': 'rectangle', 'min': [2, 2], 'max': [3, 3]}}}
        with pytest.raises(ProblemError, match=r"nu\.density: missing field\(s\) \['n'\]"):
            parse_problem_text(problem_text(nu=body))

    def test_unequal_atom_counts(self):
        text = problem_text(nu={'atoms': [[2, -0.5], [3, 1], [2.5, 2]]})
        with pytest.raises(ProblemError, match='mu has 2 atoms but nu has 3'):
            parse_problem_text(text)

    def test_uneven_weights(self):
        text = problem_text(mu={'atoms': [[-2, 0.5], [-3, -1]], 'weights': [0.25, 0.75]})
        with pytest.raises(ProblemError, match=r'mu\.weights\[0\] = 0\.25; every atom'):
            parse_problem_text(text)

    def test_explicit_uniform_weights(self):
        text = problem_text(nu={'atoms': [[2, -0.5], [3, 1]], 'weights': [0.5, 0.5]})
        _, nu = parse_problem_text(text).measures()
        assert np.array_equal(nu.weights, [0.5, 0.5])

    def test_density_count_mismatch(self):
        region = {'type': 'annulus', 'inner_radius': 2, 'outer_radius': 3}
        body = {'density': {'region': region, 'n': 5}}
        with pytest.raises(ProblemError, match='mu has 2 atoms but nu has 5'):
            parse_problem_text(problem_text(nu=body))

    def test_unknown_option(self):
        with pytest.raises(ProblemError, match='unknown option'):
            parse_problem_text(problem_text(options={'bogus': 1}))

    def test_json_position(self):
        with pytest.raises(ProblemError, match=r'^<string>:2:\d+: '):
            parse_problem_text('{\n  "obstacle": ,\n}')

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ProblemError, match='cannot read'):
            parse_problem(tmp_path / 'missing.json')
