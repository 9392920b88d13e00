"""Problem files: one obstacle and two measures, given as atoms or densities.

.. code-block:: json

    {
      "obstacle": {"type": "disk", "center": [0, 0], "radius": 1},
      "mu": {"atoms": [[-2, 0]], "weights": [1]},
      "nu": {"density": {"region": {"type": "rectangle", "min": [1, -1], "max": [2, 1]},
                         "profile": "uniform", "n": 1, "seed": 3}},
      "options": {"tol": 1e-9}
    }
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from core.errors import GeometryError, ProblemError, TransportError
from core.geometry.obstacle import ConvexObstacle, obstacle_from_dict
from core.measures.density import Annulus, DensitySpec, Rectangle, sample_density
from core.measures.discrete_measure import MASS_TOL, DiscreteMeasure
from core.settings import PipelineConfig

logger = logging.getLogger(__name__)

TOP_KEYS = {'obstacle', 'mu', 'nu', 'options'}
OBSTACLE_KEYS = {'disk': {'type', 'center', 'radius'}, 'polygon': {'type', 'vertices'}}
REGION_KEYS = {
    'rectangle': {'type', 'min', 'max'},
    'annulus': {'type', 'inner_radius', 'outer_radius'},
}
DENSITY_KEYS = {'region', 'profile', 'n', 'seed'}

Side = DiscreteMeasure | DensitySpec


@dataclass(frozen=True, eq=False)
class Problem:
    obstacle: ConvexObstacle
    mu: Side
    nu: Side
    options: dict = field(default_factory=dict)
    source: str = '<memory>'

    def measures(self) -> tuple[DiscreteMeasure, DiscreteMeasure]:
        return _resolve(self.mu, self.obstacle), _resolve(self.nu, self.obstacle)

    def config(self, base: PipelineConfig) -> PipelineConfig:
        return base.with_options(self.options)

    def to_dict(self) -> dict:
        return {
            'obstacle': self.obstacle.to_dict(),
            'mu': _side_dict(self.mu),
            'nu': _side_dict(self.nu),
            'options': dict(self.options),
        }


def _resolve(side: Side, obstacle: ConvexObstacle) -> DiscreteMeasure:
    if isinstance(side, DensitySpec):
        return sample_density(side, obstacle)
    return side


def _side_dict(side: Side) -> dict:
    if isinstance(side, DensitySpec):
        return {'density': side.to_dict()}
    return {'atoms': side.atoms.tolist(), 'weights': side.weights.tolist()}


def _expect_keys(data, allowed: set[str], where: str, required: set[str] | None = None) -> None:
    if not isinstance(data, dict):
        raise ProblemError(f'{where}: expected an object, got {type(data).__name__}')
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ProblemError(f'{where}: unknown field(s) {unknown}')
    missing = sorted((allowed if required is None else required) - set(data))
    if missing:
        raise ProblemError(f'{where}: missing field(s) {missing}')


def _pair(value, where: str) -> tuple[float, float]:
    try:
        x, y = value
        return float(x), float(y)
    except (TypeError, ValueError):
        raise ProblemError(f'{where}: expected [x, y], got {value!r}') from None


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemError(f'{where}: expected a number, got {value!r}')
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProblemError(f'{where}: expected an integer, got {value!r}')
    return value


def _parse_obstacle(data) -> ConvexObstacle:
    if not isinstance(data, dict):
        raise ProblemError(f'obstacle: expected an object, got {type(data).__name__}')
    kind = data.get('type')
    if kind not in OBSTACLE_KEYS:
        raise ProblemError(f'obstacle.type: expected "disk" or "polygon", got {kind!r}')
    _expect_keys(data, OBSTACLE_KEYS[kind], 'obstacle')

    match kind:
        case 'disk':
            clean = {
                'type': 'disk',
                'center': _pair(data['center'], 'obstacle.center'),
                'radius': _number(data['radius'], 'obstacle.radius'),
            }
        case 'polygon':
            vertices = data['vertices']
            if not isinstance(vertices, list):
                raise ProblemError('obstacle.vertices: expected a list of [x, y]')
            clean = {
                'type': 'polygon',
                'vertices': [_pair(v, f'obstacle.vertices[{k}]') for k, v in enumerate(vertices)],
            }
    try:
        return obstacle_from_dict(clean)
    except GeometryError as e:
        raise ProblemError(f'obstacle: {e}') from e


def _parse_region(data, where: str) -> Rectangle | Annulus:
    if not isinstance(data, dict) or data.get('type') not in REGION_KEYS:
        raise ProblemError(f'{where}.type: expected "rectangle" or "annulus"')
    _expect_keys(data, REGION_KEYS[data['type']], where)
    match data['type']:
        case 'rectangle':
            return Rectangle(_pair(data['min'], f'{where}.min'), _pair(data['max'], f'{where}.max'))
        case 'annulus':
            return Annulus(
                _number(data['inner_radius'], f'{where}.inner_radius'),
                _number(data['outer_radius'], f'{where}.outer_radius'),
            )


def _parse_side(data, name: str, obstacle: ConvexObstacle) -> Side:
    if isinstance(data, dict) and 'density' in data:
        _expect_keys(data, {'density'}, name)
        body = data['density']
        where = f'{name}.density'
        _expect_keys(body, DENSITY_KEYS, where, required={'region', 'n'})
        try:
            return DensitySpec(
                region=_parse_region(body['region'], f'{where}.region'),
                profile=body.get('profile', 'uniform'),
                n=_integer(body['n'], f'{where}.n'),
                seed=_integer(body.get('seed', 0), f'{where}.seed'),
            )
        except GeometryError as e:
            raise ProblemError(f'{where}: {e}') from e

    _expect_keys(data, {'atoms', 'weights'}, name, required={'atoms'})
    raw = data['atoms']
    if not isinstance(raw, list) or not raw:
        raise ProblemError(f'{name}.atoms: expected a non-empty list of [x, y]')
    atoms = np.array([_pair(p, f'{name}.atoms[{k}]') for k, p in enumerate(raw)])

    weights = data.get('weights')
    if weights is None:
        weights = np.full(len(atoms), 1.0 / len(atoms))
    else:
        if not isinstance(weights, list):
            raise ProblemError(f'{name}.weights: expected a list of numbers')
        weights = np.array([_number(w, f'{name}.weights[{k}]') for k, w in enumerate(weights)])

    inside = obstacle.interior_mask(atoms)
    if inside.any():
        idx = int(np.flatnonzero(inside)[0])
        x, y = atoms[idx]
        raise ProblemError(
            f'{name}.atoms[{idx}] = ({x:.6g}, {y:.6g}) lies inside the {obstacle.kind} obstacle'
        )
    try:
        return DiscreteMeasure(atoms, weights)
    except TransportError as e:
        raise ProblemError(f'{name}: {e}') from e


def _side_size(side: Side) -> int:
    return side.n if isinstance(side, DensitySpec) else len(side)


def _check_equal_mass(mu: Side, nu: Side) -> None:
    """Maps are built between measures of ``n`` atoms of weight ``1/n`` each."""
    for name, side in (('mu', mu), ('nu', nu)):
        if isinstance(side, DensitySpec):
            continue
        uneven = np.abs(side.weights - 1.0 / len(side)) > MASS_TOL
        if uneven.any():
            idx = int(np.flatnonzero(uneven)[0])
            raise ProblemError(
                f'{name}.weights[{idx}] = {side.weights[idx]:.6g}; '
                f'every atom must carry 1/{len(side)}'
            )
    n_mu, n_nu = _side_size(mu), _side_size(nu)
    if n_mu != n_nu:
        raise ProblemError(f'mu has {n_mu} atoms but nu has {n_nu}; a map needs equal counts')


def parse_problem_text(text: str, source: str = '<string>') -> Problem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemError(f'{source}:{e.lineno}:{e.colno}: {e.msg}') from e

    _expect_keys(data, TOP_KEYS, source, required={'obstacle', 'mu', 'nu'})
    obstacle = _parse_obstacle(data['obstacle'])
    mu = _parse_side(data['mu'], 'mu', obstacle)
    nu = _parse_side(data['nu'], 'nu', obstacle)
    _check_equal_mass(mu, nu)

    options = data.get('options', {})
    if not isinstance(options, dict):
        raise ProblemError(f'{source}: options must be an object')
    # unknown option names are rejected here rather than at solve time
    PipelineConfig().with_options(options)

    logger.info('parsed %s: %s obstacle', source, obstacle.kind)
    return Problem(obstacle=obstacle, mu=mu, nu=nu, options=options, source=source)


def parse_problem(path: str | Path) -> Problem:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ProblemError(f'cannot read {path}: {e.strerror}') from e
    return parse_problem_text(text, source=str(path))
