"""Exact discrete transportation solver.

Successive shortest paths on the complete bipartite residual network, with
node potentials keeping reduced costs nonnegative so every search is a
Dijkstra. The final potentials are the Kantorovich duals.
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.errors import TransportError
from core.measures.discrete_measure import DiscreteMeasure

logger = logging.getLogger(__name__)

MASS_TOL = 1e-12
FLOW_EPS = 1e-14


@dataclass(frozen=True, eq=False)
class TransportPlan:
    rows: np.ndarray
    cols: np.ndarray
    mass: np.ndarray
    shape: tuple[int, int]

    @classmethod
    def from_matrix(cls, flow: np.ndarray, eps: float = FLOW_EPS) -> 'TransportPlan':
        rows, cols = np.nonzero(flow > eps)
        return cls(rows, cols, flow[rows, cols], flow.shape)

    def couplings(self) -> list[tuple[int, int, float]]:
        return [(int(i), int(j), float(m)) for i, j, m in zip(self.rows, self.cols, self.mass)]

    def as_matrix(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.rows, self.cols] = self.mass
        return out

    def marginal_error(self, mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
        row = np.bincount(self.rows, weights=self.mass, minlength=self.shape[0])
        col = np.bincount(self.cols, weights=self.mass, minlength=self.shape[1])
        return float(max(np.abs(row - mu.weights).max(), np.abs(col - nu.weights).max()))

    def __len__(self) -> int:
        return len(self.mass)


@dataclass(frozen=True, eq=False)
class Potential:
    phi: np.ndarray
    psi: np.ndarray


class TransportSolver:
    def __init__(self, cost: np.ndarray, supply: np.ndarray, demand: np.ndarray):
        self.cost = np.asarray(cost, dtype=float)
        self.n, self.m = self.cost.shape
        self.supply = np.asarray(supply, dtype=float).copy()
        self.demand = np.asarray(demand, dtype=float).copy()
        self.flow = np.zeros((self.n, self.m))
        self.pi_src = np.zeros(self.n)
        self.pi_snk = self.cost.min(axis=0)
        self.augmentations = 0

    def _shortest_path(self) -> tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
        n, m = self.n, self.m
        dist = np.full(n + m, np.inf)
        dist[:n][self.supply > FLOW_EPS] = 0.0
        done = np.zeros(n + m, dtype=bool)
        parent_snk = np.full(m, -1)
        parent_src = np.full(n, -1)

        while True:
            # NOTE: argmin breaks ties by lowest index, sources before sinks
            v = int(np.argmin(np.where(done, np.inf, dist)))
            if done[v] or not np.isfinite(dist[v]):
                raise TransportError('no augmenting path left; marginals are infeasible')
            done[v] = True

            if v < n:
                reduced = self.cost[v] + self.pi_src[v] - self.pi_snk
                cand = dist[v] + np.maximum(reduced, 0.0)
                better = ~done[n:] & (cand < dist[n:])
                dist[n:][better] = cand[better]
                parent_snk[better] = v
                continue

            j = v - n
            if self.demand[j] > FLOW_EPS:
                return j, dist[:n], dist[n:], parent_src, parent_snk, float(dist[v])

            back = self.flow[:, j] > FLOW_EPS
            reduced = -self.cost[:, j] + self.pi_snk[j] - self.pi_src
            cand = dist[v] + np.maximum(reduced, 0.0)
            better = back & ~done[:n] & (cand < dist[:n])
            dist[:n][better] = cand[better]
            parent_src[better] = j

    def _augment(self, target: int, parent_src: np.ndarray, parent_snk: np.ndarray) -> float:
        path: list[tuple[int, int, bool]] = []
        j = target
        while True:
            i = int(parent_snk[j])
            path.append((i, j, True))
            if parent_src[i] < 0:
                root = i
                break
            j_prev = int(parent_src[i])
            path.append((i, j_prev, False))
            j = j_prev

        amount = min(self.supply[root], self.demand[target])
        for i, j, forward in path:
            if not forward:
                amount = min(amount, self.flow[i, j])

        for i, j, forward in path:
            self.flow[i, j] += amount if forward else -amount
        self.supply[root] -= amount
        self.demand[target] -= amount
        return amount

    def solve(self) -> np.ndarray:
        while np.any(self.supply > FLOW_EPS):
            target, d_src, d_snk, parent_src, parent_snk, reach = self._shortest_path()
            self.pi_src += np.minimum(d_src, reach)
            self.pi_snk += np.minimum(d_snk, reach)
            self._augment(target, parent_src, parent_snk)
            self.augmentations += 1

        logger.debug('transport solved in %d augmentations', self.augmentations)
        return self.flow

    def potential(self) -> Potential:
        return Potential(phi=-self.pi_src.copy(), psi=self.pi_snk.copy())


def solve_exact(
    mu: DiscreteMeasure, nu: DiscreteMeasure, cost: np.ndarray
) -> tuple[TransportPlan, Potential]:
    cost = np.asarray(cost, dtype=float)
    if cost.shape != (len(mu), len(nu)):
        raise TransportError(f'cost matrix is {cost.shape}, expected {(len(mu), len(nu))}')
    gap = abs(mu.total_mass - nu.total_mass)
    if gap > MASS_TOL:
        raise TransportError(f'total masses differ by {gap:.3g}')
    if not np.all(np.isfinite(cost)):
        raise TransportError('cost matrix has non-finite entries')

    solver = TransportSolver(cost, mu.weights, nu.weights)
    # NOTE: the last sink absorbs the mass rounding so supply and demand run out together
    solver.demand[-1] += mu.total_mass - nu.total_mass
    flow = solver.solve()
    plan = TransportPlan.from_matrix(flow)
    logger.info(
        'optimal plan: %d couplings, cost %.12g', len(plan), plan_cost(plan, cost)
    )
    return plan, solver.potential()


def plan_cost(plan: TransportPlan, cost: np.ndarray) -> float:
    return float(np.sum(plan.mass * cost[plan.rows, plan.cols]))
