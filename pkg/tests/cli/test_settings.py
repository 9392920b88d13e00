from pathlib import Path

import pytest

from core.errors import ProblemError
from core.point import Point
from core.settings import DEFAULT_LAYERS, PipelineConfig, load_config, settings
from tests.cli.cli_setup import TestCli


class TestSettings(TestCli):
    def test_solve_arguments(self):
        args = settings(['solve', 'p.json', '--out', 'runs/a', '--svg', '--layers', 'obstacle,map'])
        assert args.command == 'solve'
        assert args.problem_path == Path('p.json')
        assert args.out_dir == Path('runs/a')
        assert args.svg
        assert args.layers == ('obstacle', 'map')
        assert args.tol is None

    def test_solve_defaults(self):
        args = settings(['-vv', 'solve', 'p.json', '--out', 'o', '--tol', '1e-8'])
        assert args.verbosity == 2
        assert args.tol == 1e-8
        assert args.layers == DEFAULT_LAYERS
        assert not args.svg

    def test_geodesic_points(self):
        args = settings(['geodesic', 'p.json', '--from=-2,0', '--to', '2,0.5'])
        assert args.source == Point(-2.0, 0.0)
        assert args.target == Point(2.0, 0.5)

    def test_verify_arguments(self):
        args = settings(['verify', 'runs/a'])
        assert args.run_dir == Path('runs/a')

    def test_rejects_unknown_layer(self):
        with pytest.raises(SystemExit):
            settings(['solve', 'p.json', '--out', 'o', '--layers', 'obstacle,heatmap'])

    def test_rejects_bad_point(self):
        with pytest.raises(SystemExit):
            settings(['geodesic', 'p.json', '--from', 'origin', '--to', '2,0'])

    def test_requires_out(self):
        with pytest.raises(SystemExit):
            settings(['solve', 'p.json'])

    def test_defaults_file(self):
        assert load_config() == PipelineConfig()

    def test_config_file_overrides(self, tmp_path):
        path = tmp_path / 'fast.yaml'
        path.write_text('rays:\n  samples_per_geodesic: 2\nevolution:\n  times: [0.0]\nseed: 5\n')
        config = load_config(path)
        assert config.samples_per_geodesic == 2
        assert config.evolution_times == (0.0,)
        assert config.seed == 5
        assert config.tol == PipelineConfig().tol

    def test_config_file_unknown_key(self, tmp_path):
        path = tmp_path / 'bad.yaml'
        path.write_text('rays:\n  samples: 3\n')
        with pytest.raises(ProblemError, match='unknown setting rays.samples'):
            load_config(path)

    def test_option_validation(self):
        with pytest.raises(ProblemError, match='k_max must be at least 2'):
            PipelineConfig(monotonicity_k_max=1)
        with pytest.raises(ProblemError, match='tol must be positive'):
            PipelineConfig().with_options({'tol': 0.0})
