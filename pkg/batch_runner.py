import csv
import time

from tqdm import tqdm

from core.errors import StageError
from core.geometry.obstacle import DiskObstacle
from core.measures.density import DensitySpec, Rectangle
from core.point import Point
from core.problem import Problem
from core.runner import run_pipeline
from core.settings import load_config

SEEDS = range(20)
OUTPUT = 'batch_results.csv'


def wrap_instance(seed: int, n: int = 200) -> Problem:
    """Sources left of the unit disk, targets right of it."""
    return Problem(
        obstacle=DiskObstacle(center_point=Point(0.0, 0.0), radius=1.0),
        mu=DensitySpec(Rectangle((-4.0, -2.0), (-1.5, 2.0)), 'uniform', n, seed),
        nu=DensitySpec(Rectangle((1.5, -2.0), (4.0, 2.0)), 'uniform', n, seed + 1000),
        source=f'wrap-{seed}',
    )


def clear_instance(seed: int, n: int = 100) -> Problem:
    """A disk far from every atom, so no segment is blocked."""
    return Problem(
        obstacle=DiskObstacle(center_point=Point(0.0, 50.0), radius=1e-3),
        mu=DensitySpec(Rectangle((-4.0, -2.0), (-1.5, 2.0)), 'uniform', n, seed),
        nu=DensitySpec(Rectangle((1.5, -2.0), (4.0, 2.0)), 'uniform', n, seed + 1000),
        source=f'clear-{seed}',
    )


INSTANCES = {'wrap': wrap_instance, 'clear': clear_instance}


def run_instance(run_id: int, name: str, seed: int, config) -> dict:
    problem = INSTANCES[name](seed)
    start = time.time()
    result = run_pipeline(problem, config)
    report = result.report
    return {
        'Run_ID': run_id,
        'Instance': name,
        'Seed': seed,
        'Atoms': len(result.mu),
        'Classes': len(result.classes),
        'Cost_Map': report.cost_map,
        'Cost_Plan': report.cost_plan,
        'Cost_Gap': report.cost_gap,
        'Pushforward_OK': report.pushforward_ok,
        'Graph_Violations': report.graph_in_G_violations,
        'Monotonicity_Violations': report.monotonicity_violations,
        'Hourglass_Violations': report.hourglass_violations,
        'Passed': report.passed,
        'Runtime': time.time() - start,
        'Error': '',
    }


def main():
    config = load_config()
    tasks = [(name, seed) for name in INSTANCES for seed in SEEDS]

    fieldnames = [
        'Run_ID',
        'Instance',
        'Seed',
        'Atoms',
        'Classes',
        'Cost_Map',
        'Cost_Plan',
        'Cost_Gap',
        'Pushforward_OK',
        'Graph_Violations',
        'Monotonicity_Violations',
        'Hourglass_Violations',
        'Passed',
        'Runtime',
        'Error',
    ]

    failed = 0
    with open(OUTPUT, 'w', newline='') as csvfile:
        writer = csv.DictWriter(csvfile, fieldnames=fieldnames, restval='')
        writer.writeheader()

        for run_id, (name, seed) in enumerate(tqdm(tasks, desc='Batch Progress')):
            try:
                row = run_instance(run_id, name, seed, config)
            except StageError as e:
                print(f'Run failed: {e}')
                row = {'Run_ID': run_id, 'Instance': name, 'Seed': seed, 'Error': str(e)}
            failed += row.get('Passed') is not True
            writer.writerow(row)

    print(f'\nResults for {len(tasks)} runs: {len(tasks) - failed} passed, {failed} failed')
    print(f'  Summary: {OUTPUT}')


if __name__ == '__main__':
    main()
