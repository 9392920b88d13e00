"""Per-run certificate that the glued map transports mu to nu at the plan's cost."""

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from core.geometry.obstacle import ConvexObstacle
from core.measures.discrete_measure import DiscreteMeasure, exact_equal, pushforward
from core.monge.class_maps import hourglass_violations, quotient_violations
from core.monge.decomposition import ClassDecomposition
from core.monge.gluing import MongeMap
from core.rays.relation import NodeKind, RayRelation
from core.rays.transport_sets import TransportSets
from core.transport.diagnostics import check_cyclical_monotonicity
from core.transport.solver import Potential, TransportPlan, plan_cost

logger = logging.getLogger(__name__)


@dataclass
class VerificationReport:
    cost_map: float
    cost_plan: float
    cost_gap: float
    cost_ok: bool
    pushforward_ok: bool
    graph_in_G_violations: int
    dual_identity_violations: int
    monotonicity_violations: int
    hourglass_violations: int
    quotient_violations: int
    mu_mass_on_final_points: float
    nu_mass_on_initial_points: float
    mu_mass_on_endpoints: float
    classes: list[dict] = field(default_factory=list)
    structure_errors: list[str] = field(default_factory=list)
    tolerances: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        counts = (
            self.graph_in_G_violations,
            self.dual_identity_violations,
            self.monotonicity_violations,
            self.hourglass_violations,
            self.quotient_violations,
        )
        return (
            self.cost_ok
            and self.pushforward_ok
            and not any(counts)
            and not self.structure_errors
        )

    def failures(self) -> list[str]:
        out = []
        if not self.cost_ok:
            out.append(f'cost gap {self.cost_gap:.3g}')
        if not self.pushforward_ok:
            out.append('pushforward differs from nu')
        for name in (
            'graph_in_G_violations',
            'dual_identity_violations',
            'monotonicity_violations',
            'hourglass_violations',
            'quotient_violations',
        ):
            if getattr(self, name):
                out.append(f'{name}={getattr(self, name)}')
        out.extend(self.structure_errors)
        return out

    def to_dict(self) -> dict:
        out = asdict(self)
        out['passed'] = self.passed
        return out


def _endpoint_masses(
    rel: RayRelation, sets: TransportSets, mu: DiscreteMeasure, nu: DiscreteMeasure
) -> tuple[float, float, float]:
    nodes = rel.nodes
    src = nodes.mask(NodeKind.SOURCE)
    tgt = nodes.mask(NodeKind.TARGET)

    def mass(measure: DiscreteMeasure, mask: np.ndarray) -> float:
        return float(measure.weights[nodes.atom[mask]].sum())

    return (
        mass(mu, src & sets.b_set),
        mass(nu, tgt & sets.a_set),
        mass(mu, src & sets.T_e & ~sets.T),
    )


def verify_map(
    monge: MongeMap,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    plan: TransportPlan,
    pot: Potential,
    rel: RayRelation,
    obstacle: ConvexObstacle,
    cost: np.ndarray,
    sets: TransportSets | None = None,
    classes: list[ClassDecomposition] | None = None,
    class_maps: dict[int, dict[int, int]] | None = None,
    check_tol: float = 1e-7,
    k_max: int = 4,
    n_samples: int = 1000,
    seed: int = 0,
) -> VerificationReport:
    sigma = monge.assignment
    src = np.arange(len(mu))
    pair_cost = cost[src, sigma]

    cost_map = float(mu.weights @ pair_cost)
    cost_plan = plan_cost(plan, cost)
    gap = cost_map - cost_plan
    cost_ok = abs(gap) <= check_tol * (1.0 + cost_plan)

    image = pushforward(mu, nu.atoms[sigma])
    pushforward_ok = exact_equal(image, nu, obstacle.tol)

    # source nodes come first in atom order, target nodes right after them
    nodes = rel.nodes
    phi_src = rel.phi[np.flatnonzero(nodes.mask(NodeKind.SOURCE))]
    phi_tgt = rel.phi[np.flatnonzero(nodes.mask(NodeKind.TARGET))]
    drop = phi_src - phi_tgt[sigma]
    in_G = int(np.sum(np.abs(drop - pair_cost) > check_tol))
    dual = int(np.sum(np.abs(pot.phi + pot.psi[sigma] - pair_cost) > check_tol))

    pairs = list(zip(mu.atoms, nu.atoms[sigma]))
    cycles = check_cyclical_monotonicity(
        pairs,
        obstacle,
        k_max=k_max,
        n_samples=n_samples,
        tol=check_tol,
        seed=seed,
        dist=cost[:, sigma],
    )

    class_maps = class_maps or {}
    summaries = []
    hourglass_bad = quotient_bad = 0
    for cls in classes or []:
        h = hourglass_violations(cls, class_maps.get(cls.label, {}))
        q = quotient_violations(cls, mu, nu)
        hourglass_bad += h
        quotient_bad += q
        summaries.append(cls.summary() | {'hourglass_violations': h, 'quotient_violations': q})

    structure_errors = sets.consistency_errors() if sets is not None else []
    on_b, on_a, on_ends = _endpoint_masses(rel, sets, mu, nu) if sets is not None else (0, 0, 0)

    report = VerificationReport(
        cost_map=cost_map,
        cost_plan=cost_plan,
        cost_gap=gap,
        cost_ok=bool(cost_ok),
        pushforward_ok=bool(pushforward_ok),
        graph_in_G_violations=in_G,
        dual_identity_violations=dual,
        monotonicity_violations=len(cycles),
        hourglass_violations=hourglass_bad,
        quotient_violations=quotient_bad,
        mu_mass_on_final_points=float(on_b),
        nu_mass_on_initial_points=float(on_a),
        mu_mass_on_endpoints=float(on_ends),
        classes=summaries,
        structure_errors=structure_errors,
        tolerances={
            'geometry': obstacle.tol,
            'relation': rel.tol,
            'check': check_tol,
            'hourglass': 1e-12,
        },
    )
    if report.passed:
        logger.info('verification passed: cost %.12g, gap %.3g', cost_map, gap)
    else:
        logger.warning('verification failed: %s', ', '.join(report.failures()))
    return report
