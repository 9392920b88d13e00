from pathlib import Path

from core.geometry.obstacle import scene_diameter
from core.problem import parse_problem
from core.rays.chains import chains
from core.rays.relation import build_G, build_nodes, c_transform
from core.rays.transport_sets import transport_sets
from core.settings import PipelineConfig
from core.transport.cost import cost_matrix
from core.transport.solver import solve_exact

PROBLEMS = Path(__file__).resolve().parents[2] / 'problems'


class TestRays:
    def setup_method(self, method):
        problem = parse_problem(PROBLEMS / 'wrap.json')
        self.config = problem.config(PipelineConfig())
        self.mu, self.nu = problem.measures()
        self.tol = self.config.tol * (
            1.0 + scene_diameter(problem.obstacle, self.mu.atoms, self.nu.atoms)
        )
        self.obstacle = problem.obstacle.with_tolerance(self.tol)

        self.cost = cost_matrix(self.mu, self.nu, self.obstacle)
        self.plan, self.pot = solve_exact(self.mu, self.nu, self.cost)
        self.nodes = build_nodes(
            self.mu, self.nu, self.plan, self.obstacle, self.config.samples_per_geodesic
        )
        phi = c_transform(self.nodes.points, self.nu, self.pot, self.obstacle)
        self.rel = build_G(self.nodes, phi, self.obstacle, self.tol)
        self.sets = transport_sets(self.rel)
        self.partition = chains(self.rel, self.sets)
