"""Output directory of a solve run: CSV dumps, a problem copy, a figure and report.json."""

import csv
import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from datetime import datetime
from datetime import timezone as _timezone
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from core.geometry.obstacle import PolygonObstacle
from core.monge.verification import VerificationReport
from core.rays.relation import NodeKind
from core.ui.svg import render_svg

if TYPE_CHECKING:
    from core.runner import PipelineResult

UTC = _timezone.utc

logger = logging.getLogger(__name__)

TOOL_VERSION = '0.1.0'

PLAN_FILE = 'plan.csv'
POTENTIALS_FILE = 'potentials.csv'
RAYS_FILE = 'rays.csv'
CLASSES_FILE = 'classes.csv'
MAP_FILE = 'map.csv'
PROBLEM_FILE = 'problem.json'
REPORT_FILE = 'report.json'
SVG_FILE = 'figure.svg'

CLASS_FIELDS = [
    'label',
    'kind',
    'geodesics',
    'sources',
    'targets',
    'theta_z',
    'theta_w',
    'clockwise',
    'split_from',
    'hourglass_violations',
    'quotient_violations',
]


@dataclass
class RunArtifacts:
    out_dir: Path
    plan: Path
    potentials: Path
    rays: Path
    classes: Path
    map: Path
    problem: Path
    report: Path
    svg: Path | None = None

    def files(self) -> dict[str, Path]:
        named = {
            'plan': self.plan,
            'potentials': self.potentials,
            'rays': self.rays,
            'classes': self.classes,
            'map': self.map,
            'problem': self.problem,
        }
        if self.svg is not None:
            named['svg'] = self.svg
        return named


def sha256_of(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_csv(path: Path, fieldnames: list[str], rows) -> None:
    with open(path, 'w', newline='') as csvfile:
        writer = csv.DictWriter(csvfile, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _plan_rows(result: 'PipelineResult'):
    for i, j, mass in result.plan.couplings():
        yield {
            'mu_index': i,
            'nu_index': j,
            'mass': _fmt(mass),
            'cost': _fmt(result.cost[i, j]),
        }


def _potential_rows(result: 'PipelineResult'):
    nodes = result.nodes
    pot = result.potential
    for k in range(len(nodes)):
        kind = nodes.kinds[k]
        x, y = nodes.points[k]
        match kind:
            case NodeKind.SOURCE:
                value = pot.phi[nodes.atom[k]]
            case NodeKind.TARGET:
                value = pot.psi[nodes.atom[k]]
            case NodeKind.SAMPLE:
                value = result.relation.phi[k]
        yield {
            'node': k,
            'kind': kind.value,
            'atom': int(nodes.atom[k]),
            'x': _fmt(x),
            'y': _fmt(y),
            'dual': _fmt(value),
            'phi': _fmt(result.relation.phi[k]),
        }


def _ray_rows(result: 'PipelineResult'):
    nodes = result.nodes
    sets = result.sets
    for k in range(len(nodes)):
        x, y = nodes.points[k]
        yield {
            'node': k,
            'kind': nodes.kinds[k].value,
            'atom': int(nodes.atom[k]),
            'geodesic': int(nodes.geodesic[k]),
            'offset': _fmt(nodes.offset[k]),
            'x': _fmt(x),
            'y': _fmt(y),
            'in_T': int(sets.T[k]),
            'in_T_e': int(sets.T_e[k]),
            'initial': int(sets.a_set[k]),
            'final': int(sets.b_set[k]),
            'chain_class': result.partition.label_of(k),
        }


def _map_rows(result: 'PipelineResult'):
    monge = result.monge
    for i, j in enumerate(monge.assignment):
        yield {
            'mu_index': i,
            'nu_index': int(j),
            'class': int(monge.provenance[i]),
            'cost': _fmt(result.cost[i, j]),
        }


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f'cannot serialize {type(value).__name__}')


def emit_report(report: VerificationReport, meta: dict | None = None) -> str:
    """Stable JSON text of the verification report and run metadata."""
    body = {'verification': report.to_dict()} | dict(meta or {})
    return json.dumps(body, sort_keys=True, indent=2, default=_json_default) + '\n'


def load_report(path: str | Path) -> dict:
    with open(path) as f:
        return json.load(f)


def report_meta(result: 'PipelineResult', hashes: dict[str, str]) -> dict:
    obstacle = result.obstacle
    return {
        'tool_version': TOOL_VERSION,
        'seed': result.config.seed,
        'config': result.config.to_dict(),
        'obstacle_kind': obstacle.kind,
        'smooth_boundary': not isinstance(obstacle, PolygonObstacle),
        'scene_tolerance': obstacle.tol,
        'duality_gap': result.duality_gap,
        'partial_order': asdict(result.partial_order),
        'evolution': [asdict(step) for step in result.evolution],
        'closure': asdict(result.closure) if result.closure is not None else None,
        'counts': {
            'mu_atoms': len(result.mu),
            'nu_atoms': len(result.nu),
            'couplings': len(result.plan),
            'nodes': len(result.nodes),
            'classes': len(result.classes),
        },
        'files': hashes,
    }


def write_artifacts(
    result: 'PipelineResult',
    out_dir: str | Path,
    svg: bool = False,
    layers: tuple[str, ...] = (),
    stamp: bool = True,
) -> RunArtifacts:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    artifacts = RunArtifacts(
        out_dir=out,
        plan=out / PLAN_FILE,
        potentials=out / POTENTIALS_FILE,
        rays=out / RAYS_FILE,
        classes=out / CLASSES_FILE,
        map=out / MAP_FILE,
        problem=out / PROBLEM_FILE,
        report=out / REPORT_FILE,
        svg=out / SVG_FILE if svg else None,
    )

    _write_csv(artifacts.plan, ['mu_index', 'nu_index', 'mass', 'cost'], _plan_rows(result))
    _write_csv(
        artifacts.potentials,
        ['node', 'kind', 'atom', 'x', 'y', 'dual', 'phi'],
        _potential_rows(result),
    )
    _write_csv(
        artifacts.rays,
        [
            'node',
            'kind',
            'atom',
            'geodesic',
            'offset',
            'x',
            'y',
            'in_T',
            'in_T_e',
            'initial',
            'final',
            'chain_class',
        ],
        _ray_rows(result),
    )
    _write_csv(artifacts.classes, CLASS_FIELDS, result.report.classes)
    _write_csv(artifacts.map, ['mu_index', 'nu_index', 'class', 'cost'], _map_rows(result))

    problem = result.problem.to_dict()
    problem['options'] = result.config.to_dict()
    artifacts.problem.write_text(json.dumps(problem, sort_keys=True, indent=2) + '\n')

    if artifacts.svg is not None:
        artifacts.svg.write_text(render_svg(result, layers))

    hashes = {name: sha256_of(path) for name, path in artifacts.files().items()}
    meta = report_meta(result, hashes)
    if artifacts.svg is not None:
        meta['svg_layers'] = list(layers)
    if stamp:
        # not hashed; the only field that differs between identical runs
        meta['created_at'] = datetime.now(UTC).isoformat(timespec='seconds')
    artifacts.report.write_text(emit_report(result.report, meta))

    logger.info('wrote %d artifacts to %s', len(hashes) + 1, out)
    return artifacts
