import csv
import json

import pytest

from core.artifacts import emit_report, load_report, sha256_of, write_artifacts
from core.problem import parse_problem
from core.runner import run_pipeline
from core.settings import PipelineConfig
from core.ui.svg import class_color, render_svg
from tests.cli.cli_setup import TestCli


class TestArtifacts(TestCli):
    def setup_method(self, method):
        super().setup_method(method)
        problem = parse_problem(self.wrap)
        self.result = run_pipeline(problem, problem.config(PipelineConfig()))

    def test_files_and_hashes(self, tmp_path):
        artifacts = write_artifacts(self.result, tmp_path, stamp=False)
        report = load_report(artifacts.report)
        for name, path in artifacts.files().items():
            assert report['files'][name] == sha256_of(path)
        assert 'created_at' not in report
        assert 'svg_layers' not in report

    def test_plan_and_map_rows(self, tmp_path):
        artifacts = write_artifacts(self.result, tmp_path)
        with open(artifacts.plan) as f:
            plan = list(csv.DictReader(f))
        with open(artifacts.map) as f:
            rows = list(csv.DictReader(f))
        assert len(plan) == len(self.result.plan)
        assert sum(float(r['mass']) for r in plan) == pytest.approx(1.0)
        assert [int(r['nu_index']) for r in rows] == self.result.monge.assignment.tolist()

    def test_rays_rows(self, tmp_path):
        artifacts = write_artifacts(self.result, tmp_path)
        with open(artifacts.rays) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == len(self.result.nodes)
        assert {r['kind'] for r in rows} == {'source', 'target', 'sample'}

    def test_problem_copy_holds_the_config(self, tmp_path):
        artifacts = write_artifacts(self.result, tmp_path)
        copy = json.loads(artifacts.problem.read_text())
        assert copy['options'] == self.result.config.to_dict()

    def test_emit_report(self):
        text = emit_report(self.result.report, {'seed': 0})
        body = json.loads(text)
        assert body['seed'] == 0
        assert body['verification']['passed'] is True
        assert text == emit_report(self.result.report, {'seed': 0})


class TestSvg(TestCli):
    def solve(self, path):
        problem = parse_problem(path)
        return run_pipeline(problem, problem.config(PipelineConfig()))

    def test_obstacle_only(self):
        svg = render_svg(self.solve(self.wrap), ('obstacle',))
        assert svg.count('<circle') == 1
        assert '<g id="obstacle">' in svg
        assert '<g id="map">' not in svg

    def test_atoms_layer(self):
        svg = render_svg(self.solve(self.wrap), ('atoms',))
        assert svg.count('<circle') == 8

    def test_identity_map_has_no_arrows(self):
        svg = render_svg(self.solve(self.identity), ('map',))
        assert '<g id="map">' in svg
        assert '<line' not in svg

    def test_classes_are_coloured(self):
        svg = render_svg(self.solve(self.two_rays), ('classes',))
        assert class_color(0) in svg
        assert class_color(1) in svg
        assert class_color(0) != class_color(1)

    def test_layer_order(self):
        svg = render_svg(self.solve(self.wrap), ('atoms', 'obstacle', 'map'))
        assert svg.index('id="obstacle"') < svg.index('id="map"') < svg.index('id="atoms"')
