import logging
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from core.artifacts import (
    PROBLEM_FILE,
    REPORT_FILE,
    RunArtifacts,
    load_report,
    sha256_of,
    write_artifacts,
)
from core.errors import StageError
from core.geometry.obstacle import ConvexObstacle, scene_diameter
from core.measures.discrete_measure import DiscreteMeasure
from core.monge.decomposition import ClassDecomposition, decompose_classes
from core.monge.gluing import MongeMap, build_class_maps, glue_maps
from core.monge.verification import VerificationReport, verify_map
from core.problem import Problem, parse_problem
from core.rays.chains import ChainPartition, chains, components_by_search, same_partition
from core.rays.evolution import EvolutionStep, evolution_diagnostic
from core.rays.relation import (
    ClosureReport,
    PartialOrderReport,
    RayNodes,
    RayRelation,
    build_G,
    build_nodes,
    c_transform,
    check_closure,
    check_partial_order,
)
from core.rays.transport_sets import TransportSets, transport_sets
from core.settings import PipelineConfig
from core.transport.cost import cost_matrix
from core.transport.diagnostics import duality_gap
from core.transport.solver import Potential, TransportPlan, solve_exact

logger = logging.getLogger(__name__)

# the closure enumerates couplings ** (closure_max_chain + 1) chains
CLOSURE_MAX_COUPLINGS = 12


@dataclass
class PipelineResult:
    problem: Problem
    config: PipelineConfig
    obstacle: ConvexObstacle
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    cost: np.ndarray
    plan: TransportPlan
    potential: Potential
    duality_gap: float
    nodes: RayNodes
    relation: RayRelation
    sets: TransportSets
    partition: ChainPartition
    classes: list[ClassDecomposition]
    class_maps: dict[int, dict[int, int]]
    monge: MongeMap
    report: VerificationReport
    partial_order: PartialOrderReport
    evolution: list[EvolutionStep] = field(default_factory=list)
    closure: ClosureReport | None = None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.report.passed


class PipelineRunner:
    """Runs every stage on one problem; failures surface as ``StageError`` with the stage label."""

    def __init__(self, problem: Problem, config: PipelineConfig):
        self.problem = problem
        self.config = config
        self.timings: dict[str, float] = {}

    def _stage(self, label: str, fn, *args, **kwargs):
        start = time.time()
        try:
            out = fn(*args, **kwargs)
        except Exception as e:
            raise StageError(label, e) from e
        self.timings[label] = time.time() - start
        logger.debug('stage %s took %.3fs', label, self.timings[label])
        return out

    def _evolution_ids(self, nodes: RayNodes, sets: TransportSets) -> np.ndarray:
        ids = np.flatnonzero(sets.T_e)
        if len(ids) > self.config.evolution_max_nodes:
            rng = np.random.default_rng(self.config.seed)
            ids = np.sort(rng.choice(ids, size=self.config.evolution_max_nodes, replace=False))
        return ids

    def run(self) -> PipelineResult:
        cfg = self.config
        mu, nu = self._stage('sample', self.problem.measures)

        tol = cfg.tol * (1.0 + scene_diameter(self.problem.obstacle, mu.atoms, nu.atoms))
        obstacle = self.problem.obstacle.with_tolerance(tol)
        logger.info('scene tolerance %.3g', tol)

        cost = self._stage('cost', cost_matrix, mu, nu, obstacle)
        plan, pot = self._stage('solve', solve_exact, mu, nu, cost)
        gap = self._stage('solve', duality_gap, plan, pot, mu, nu, cost, tol=cfg.check_tol)

        def rays():
            nodes = build_nodes(mu, nu, plan, obstacle, cfg.samples_per_geodesic)
            phi = c_transform(nodes.points, nu, pot, obstacle)
            return build_G(nodes, phi, obstacle, tol)

        rel = self._stage('rays', rays)
        order = self._stage('rays', check_partial_order, rel, obstacle, cfg.check_tol)
        closure = None
        if len(plan) <= CLOSURE_MAX_COUPLINGS:
            closure = self._stage(
                'rays',
                check_closure,
                plan,
                mu,
                nu,
                pot,
                obstacle,
                cfg.closure_max_chain,
                cfg.check_tol,
                k_max=cfg.monotonicity_k_max,
                n_samples=cfg.monotonicity_samples,
                seed=cfg.seed,
            )
        sets = self._stage('sets', transport_sets, rel)
        partition = self._stage('chains', chains, rel, sets)
        searched = self._stage('chains', components_by_search, rel, sets)

        classes = self._stage('classes', decompose_classes, rel.nodes, partition, obstacle)
        class_maps = self._stage('maps', build_class_maps, classes, mu, nu)
        monge = self._stage('glue', glue_maps, class_maps, mu, nu, rel.nodes)

        report = self._stage(
            'verify',
            verify_map,
            monge,
            mu,
            nu,
            plan,
            pot,
            rel,
            obstacle,
            cost,
            sets=sets,
            classes=classes,
            class_maps=class_maps,
            check_tol=cfg.check_tol,
            k_max=cfg.monotonicity_k_max,
            n_samples=cfg.monotonicity_samples,
            seed=cfg.seed,
        )
        if not order.ok:
            report.structure_errors.append(f'G is not a partial order: {order}')
        if not same_partition(partition.class_id, searched):
            report.structure_errors.append('chain classes differ from graph search components')
        if closure is not None and not closure.ok:
            report.structure_errors.append(f'plan closure fails its checks: {closure}')

        evolution = self._stage(
            'verify',
            evolution_diagnostic,
            rel.nodes,
            self._evolution_ids(rel.nodes, sets),
            cfg.evolution_times,
            obstacle,
            mu,
            tol,
        )

        return PipelineResult(
            problem=self.problem,
            config=cfg,
            obstacle=obstacle,
            mu=mu,
            nu=nu,
            cost=cost,
            plan=plan,
            potential=pot,
            duality_gap=gap,
            nodes=rel.nodes,
            relation=rel,
            sets=sets,
            partition=partition,
            classes=classes,
            class_maps=class_maps,
            monge=monge,
            report=report,
            partial_order=order,
            evolution=evolution,
            closure=closure,
            timings=dict(self.timings),
        )


def effective_config(
    problem: Problem, base: PipelineConfig, tol: float | None = None
) -> PipelineConfig:
    """defaults < problem options < command line."""
    config = problem.config(base)
    return config.with_options({'tol': tol}) if tol is not None else config


def run_pipeline(problem: Problem, config: PipelineConfig) -> PipelineResult:
    return PipelineRunner(problem, config).run()


def run_solve(
    problem: Problem,
    out_dir: str | Path,
    config: PipelineConfig,
    svg: bool = False,
    layers: tuple[str, ...] = (),
) -> tuple[PipelineResult, RunArtifacts]:
    result = run_pipeline(problem, config)
    try:
        artifacts = write_artifacts(result, out_dir, svg=svg, layers=layers)
    except Exception as e:
        raise StageError('write', e) from e
    return result, artifacts


@dataclass
class RerunOutcome:
    result: PipelineResult
    mismatches: list[str]

    @property
    def passed(self) -> bool:
        return self.result.passed and not self.mismatches


def verify_run(run_dir: str | Path) -> RerunOutcome:
    """Rebuild a solved directory from its problem copy and compare hashes and the report."""
    run_dir = Path(run_dir)
    stored = load_report(run_dir / REPORT_FILE)
    problem = parse_problem(run_dir / PROBLEM_FILE)
    result = run_pipeline(problem, problem.config(PipelineConfig()))

    layers = tuple(stored.get('svg_layers', ()))
    with tempfile.TemporaryDirectory() as scratch:
        fresh = write_artifacts(result, scratch, svg='svg_layers' in stored, layers=layers)
        again = load_report(fresh.report)
        stored_files = stored.get('files', {})
        mismatches = [
            f'{name} differs from the stored run'
            for name, digest in sorted(stored_files.items())
            if again['files'].get(name) != digest
        ]
        for name, path in fresh.files().items():
            on_disk = run_dir / path.name
            if not on_disk.exists() or sha256_of(on_disk) != stored_files.get(name):
                mismatches.append(f'{name} on disk does not match its recorded hash')
    if again['verification'] != stored.get('verification'):
        mismatches.append('verification report differs from the stored run')

    if mismatches:
        logger.warning('re-run of %s disagrees: %s', run_dir, '; '.join(mismatches))
    return RerunOutcome(result=result, mismatches=mismatches)
