import itertools
import logging
from dataclasses import dataclass

import numpy as np

from core.errors import TransportError
from core.geometry.geodesic import pairwise_lengths
from core.geometry.obstacle import ConvexObstacle
from core.measures.discrete_measure import DiscreteMeasure
from core.point import as_points
from core.transport.solver import Potential, TransportPlan, plan_cost

logger = logging.getLogger(__name__)

DUAL_TOL = 1e-9
EXHAUSTIVE_LIMIT = 6


@dataclass(frozen=True)
class CycleViolation:
    """A cyclic reassignment of ``pairs`` that lowers their total cost by ``saving``."""

    cycle: tuple[int, ...]
    saving: float


def dual_violation(pot: Potential, cost: np.ndarray) -> float:
    return float((pot.phi[:, None] + pot.psi[None, :] - cost).max())


def duality_gap(
    plan: TransportPlan,
    pot: Potential,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    cost: np.ndarray,
    tol: float = DUAL_TOL,
) -> float:
    """Primal cost minus dual objective; signed so rounding below zero stays visible."""
    excess = dual_violation(pot, cost)
    if excess > tol:
        raise TransportError(f'potentials violate dual feasibility by {excess:.3g}')
    dual = float(pot.phi @ mu.weights + pot.psi @ nu.weights)
    return plan_cost(plan, cost) - dual


def _cycle_excess(dist: np.ndarray, cycle: tuple[int, ...]) -> float:
    idx = np.asarray(cycle)
    shifted = np.roll(idx, -1)
    return float(dist[shifted, idx].sum() - dist[idx, idx].sum())


def _cycles(n: int, k_max: int, n_samples: int, rng: np.random.Generator):
    if n <= EXHAUSTIVE_LIMIT:
        for k in range(2, min(k_max, n) + 1):
            for cycle in itertools.permutations(range(n), k):
                # one representative per rotation
                if cycle[0] == min(cycle):
                    yield cycle
    if n < 2:
        return
    for _ in range(n_samples):
        k = int(rng.integers(2, min(k_max, n) + 1))
        yield tuple(int(v) for v in rng.choice(n, size=k, replace=False))


def check_cyclical_monotonicity(
    pairs,
    obstacle: ConvexObstacle,
    k_max: int = 4,
    n_samples: int = 1000,
    tol: float = 1e-7,
    seed: int = 0,
    dist: np.ndarray | None = None,
) -> list[CycleViolation]:
    """Cycles of ``pairs`` whose cyclic shift ``x_{i+1} -> y_i`` is cheaper than the pairing.

    ``dist[a, b]`` is ``d_M(x_a, y_b)``; it is computed when not supplied.
    """
    if k_max < 2:
        raise TransportError(f'k_max must be at least 2, got {k_max}')
    pairs = list(pairs)
    if dist is None:
        xs = as_points([p for p, _ in pairs])
        ys = as_points([q for _, q in pairs])
        dist = pairwise_lengths(obstacle, xs, ys)

    rng = np.random.default_rng(seed)
    violations = []
    for cycle in _cycles(len(pairs), k_max, n_samples, rng):
        excess = _cycle_excess(dist, cycle)
        if excess < -tol:
            violations.append(CycleViolation(cycle, -excess))

    if violations:
        logger.warning('%d cyclical monotonicity violations', len(violations))
    return violations
