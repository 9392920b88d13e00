import logging
import sys

from core.errors import GeometryError, ProblemError, StageError
from core.geometry.geodesic import geodesic
from core.problem import parse_problem
from core.runner import effective_config, run_solve, verify_run
from core.settings import Settings, load_config, settings

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

INPUT_STAGES = ('sample',)

logger = logging.getLogger('main')


def configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def solve(args: Settings) -> int:
    problem = parse_problem(args.problem_path)
    config = effective_config(problem, load_config(args.config_path), args.tol)
    result, artifacts = run_solve(problem, args.out_dir, config, svg=args.svg, layers=args.layers)
    report = result.report

    print(f'\nResults for {args.problem_path}:')
    print(f'  Obstacle: {result.obstacle.kind}')
    print(f'  Atoms: {len(result.mu)} -> {len(result.nu)}')
    print(f'  Classes: {len(result.classes)}')
    print(f'  Map Cost: {report.cost_map:.12g}')
    print(f'  Plan Cost: {report.cost_plan:.12g}')
    print(f'  Cost Gap: {report.cost_gap:.3g}')
    print(f'  Pushforward: {"ok" if report.pushforward_ok else "FAILED"}')
    print(f'  Verification: {"passed" if report.passed else "FAILED"}')
    for failure in report.failures():
        print(f'    - {failure}')
    print(f'  Artifacts: {artifacts.out_dir}')
    return EXIT_OK if report.passed else EXIT_VERIFICATION


def verify(args: Settings) -> int:
    outcome = verify_run(args.run_dir)

    print(f'\nResults for {args.run_dir}:')
    print(f'  Verification: {"passed" if outcome.result.passed else "FAILED"}')
    for failure in outcome.result.report.failures():
        print(f'    - {failure}')
    print(f'  Reproduced: {"yes" if not outcome.mismatches else "NO"}')
    for mismatch in outcome.mismatches:
        print(f'    - {mismatch}')
    return EXIT_OK if outcome.passed else EXIT_VERIFICATION


def shortest_path(args: Settings) -> int:
    problem = parse_problem(args.problem_path)
    obstacle = problem.obstacle
    obstacle.check_admissible([args.source, args.target], 'endpoint')
    path = geodesic(obstacle, args.source, args.target)

    src, tgt = args.source, args.target
    print(f'\nGeodesic from ({src.x:g}, {src.y:g}) to ({tgt.x:g}, {tgt.y:g}):')
    print(f'  Length: {path.total_length:.12g}')
    contact = path.boundary_contact()
    if contact is None or contact.arc_length == 0:
        print('  Straight segment')
    else:
        direction = 'clockwise' if contact.clockwise else 'counterclockwise'
        print(f'  Boundary arc: {contact.arc_length:.12g} ({direction})')
    return EXIT_OK


COMMANDS = {'solve': solve, 'verify': verify, 'geodesic': shortest_path}


def run(args: Settings) -> int:
    try:
        return COMMANDS[args.command](args)
    except (ProblemError, GeometryError) as e:
        print(f'Input error: {e}', file=sys.stderr)
        return EXIT_INPUT
    except StageError as e:
        if e.stage in INPUT_STAGES and isinstance(e.cause, (ProblemError, GeometryError)):
            print(f'Input error: {e}', file=sys.stderr)
            return EXIT_INPUT
        logger.debug('stage failure', exc_info=e)
        print(f'Internal error: {e}', file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as e:
        logger.debug('unexpected failure', exc_info=e)
        print(f'Internal error: {e}', file=sys.stderr)
        return EXIT_INTERNAL


def main(argv: list[str] | None = None) -> int:
    args = settings(argv)
    configure_logging(args.verbosity)
    return run(args)


if __name__ == '__main__':
    sys.exit(main())
