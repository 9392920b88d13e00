import argparse
from dataclasses import dataclass, fields, replace
from pathlib import Path

import yaml

from core.errors import ProblemError
from core.point import Point

DEFAULTS_PATH = Path(__file__).resolve().parent.parent / 'config' / 'defaults.yaml'

LAYERS = ('obstacle', 'atoms', 'geodesics', 'g-edges', 'classes', 'map')
DEFAULT_LAYERS = ('obstacle', 'atoms', 'classes', 'map')

# (section, key) in defaults.yaml -> PipelineConfig field
YAML_FIELDS = {
    ('tolerance', 'tol'): 'tol',
    ('tolerance', 'check_tol'): 'check_tol',
    ('rays', 'samples_per_geodesic'): 'samples_per_geodesic',
    ('rays', 'closure_max_chain'): 'closure_max_chain',
    ('monotonicity', 'k_max'): 'monotonicity_k_max',
    ('monotonicity', 'samples'): 'monotonicity_samples',
    ('evolution', 'times'): 'evolution_times',
    ('evolution', 'max_nodes'): 'evolution_max_nodes',
    ('seed', None): 'seed',
}


@dataclass(frozen=True)
class PipelineConfig:
    tol: float = 1e-9
    check_tol: float = 1e-7
    samples_per_geodesic: int = 8
    closure_max_chain: int = 2
    monotonicity_k_max: int = 4
    monotonicity_samples: int = 1000
    evolution_times: tuple[float, ...] = (0.0, 0.1, 0.5)
    evolution_max_nodes: int = 400
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ProblemError(f'tol must be positive, got {self.tol}')
        if not self.check_tol > 0:
            raise ProblemError(f'check_tol must be positive, got {self.check_tol}')
        if self.samples_per_geodesic < 0:
            raise ProblemError(
                f'samples_per_geodesic must be non-negative, got {self.samples_per_geodesic}'
            )
        if self.monotonicity_k_max < 2:
            raise ProblemError(
                f'monotonicity k_max must be at least 2, got {self.monotonicity_k_max}'
            )

    def with_options(self, options: dict) -> 'PipelineConfig':
        """Overlay flat ``{field: value}`` options; unknown names are rejected."""
        known = {f.name for f in fields(self)}
        unknown = sorted(set(options) - known)
        if unknown:
            raise ProblemError(f'unknown option(s) {unknown}; expected a subset of {sorted(known)}')
        values = dict(options)
        if 'evolution_times' in values:
            values['evolution_times'] = tuple(float(t) for t in values['evolution_times'])
        return replace(self, **values)

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out['evolution_times'] = list(self.evolution_times)
        return out


def load_config(path: str | Path = DEFAULTS_PATH) -> PipelineConfig:
    with open(path) as f:
        data = yaml.safe_load(f) or {}

    values = {}
    for section, body in data.items():
        if not isinstance(body, dict):
            if (section, None) not in YAML_FIELDS:
                raise ProblemError(f'{path}: unknown setting {section!r}')
            values[YAML_FIELDS[(section, None)]] = body
            continue
        for key, value in body.items():
            if (section, key) not in YAML_FIELDS:
                raise ProblemError(f'{path}: unknown setting {section}.{key}')
            values[YAML_FIELDS[(section, key)]] = value
    return PipelineConfig().with_options(values)


@dataclass
class Settings:
    command: str
    problem_path: Path | None = None
    out_dir: Path | None = None
    run_dir: Path | None = None
    tol: float | None = None
    svg: bool = False
    layers: tuple[str, ...] = DEFAULT_LAYERS
    source: Point | None = None
    target: Point | None = None
    config_path: Path = DEFAULTS_PATH
    verbosity: int = 0


def _point(text: str) -> Point:
    try:
        x, y = (float(v) for v in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected "x,y", got {text!r}') from None
    return Point(x, y)


def _layers(text: str) -> tuple[str, ...]:
    names = tuple(v.strip() for v in text.split(',') if v.strip())
    bad = [v for v in names if v not in LAYERS]
    if bad:
        raise argparse.ArgumentTypeError(f'unknown layer(s) {bad}; choose from {list(LAYERS)}')
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Build and certify an optimal transport map around a convex obstacle.'
    )
    parser.add_argument(
        '-v', '--verbose', action='count', default=0, help='-v for progress, -vv for detail'
    )
    parser.add_argument(
        '--config', type=Path, default=DEFAULTS_PATH, help='Pipeline defaults (YAML)'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    solve = sub.add_parser('solve', help='Run the full pipeline on a problem file')
    solve.add_argument('problem', type=Path, help='Problem file (JSON)')
    solve.add_argument('--out', type=Path, required=True, help='Output directory')
    solve.add_argument('--tol', type=float, help='Geometry tolerance (overrides the problem)')
    solve.add_argument('--svg', action='store_true', help='Also render figure.svg')
    solve.add_argument(
        '--layers',
        type=_layers,
        default=DEFAULT_LAYERS,
        help=f'Comma separated SVG layers out of {",".join(LAYERS)}',
    )

    verify = sub.add_parser('verify', help='Re-run a solved output directory and compare')
    verify.add_argument('run_dir', type=Path, help='Directory written by solve')

    geo = sub.add_parser('geodesic', help='Shortest path between two points')
    geo.add_argument('problem', type=Path, help='Problem file holding the obstacle')
    geo.add_argument('--from', dest='source', type=_point, required=True, help='x,y')
    geo.add_argument('--to', dest='target', type=_point, required=True, help='x,y')
    return parser


def settings(argv: list[str] | None = None) -> Settings:
    args = build_parser().parse_args(argv)

    return Settings(
        command=args.command,
        problem_path=getattr(args, 'problem', None),
        out_dir=getattr(args, 'out', None),
        run_dir=getattr(args, 'run_dir', None),
        tol=getattr(args, 'tol', None),
        svg=getattr(args, 'svg', False),
        layers=getattr(args, 'layers', DEFAULT_LAYERS),
        source=getattr(args, 'source', None),
        target=getattr(args, 'target', None),
        config_path=args.config,
        verbosity=args.verbose,
    )
