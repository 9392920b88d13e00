import logging

import numpy as np

from core.errors import TransportError
from core.measures.discrete_measure import DiscreteMeasure
from core.measures.step_cdf import build_cdf
from core.monge.decomposition import ClassDecomposition, ClassKind, Member, Side

logger = logging.getLogger(__name__)

CLASS_MASS_TOL = 1e-10


def _sorted_matching(
    cls: ClassDecomposition, mu: DiscreteMeasure, nu: DiscreteMeasure
) -> dict[int, int]:
    sources = cls.side(Side.SOURCE)
    targets = cls.side(Side.TARGET)
    src_mass = float(sum(mu.weights[m.atom] for m in sources))
    tgt_mass = float(sum(nu.weights[m.atom] for m in targets))
    if abs(src_mass - tgt_mass) > CLASS_MASS_TOL:
        raise TransportError(
            f'class {cls.label} carries source mass {src_mass:.12g} '
            f'but target mass {tgt_mass:.12g}'
        )
    if len(sources) != len(targets):
        raise TransportError(
            f'class {cls.label} has {len(sources)} sources and {len(targets)} targets'
        )

    def order(m: Member) -> tuple[float, float, int]:
        return (m.key[0], m.key[1], m.atom)

    return {
        s.atom: t.atom
        for s, t in zip(sorted(sources, key=order), sorted(targets, key=order), strict=True)
    }


def monotone_map_on_class(
    cls: ClassDecomposition, mu: DiscreteMeasure, nu: DiscreteMeasure
) -> dict[int, int]:
    """k-th source to k-th target, both ordered by ``(t, s, atom)``."""
    if cls.kind is not ClassKind.BOUNDARY:
        raise TransportError(f'class {cls.label} is {cls.kind.value}, not a boundary class')
    return _sorted_matching(cls, mu, nu)


def straight_class_map(
    cls: ClassDecomposition, mu: DiscreteMeasure, nu: DiscreteMeasure
) -> dict[int, int]:
    """Monotone rearrangement along the class line, in the transport direction."""
    if cls.kind is not ClassKind.STRAIGHT:
        raise TransportError(f'class {cls.label} is {cls.kind.value}, not a straight class')
    return _sorted_matching(cls, mu, nu)


def class_map(cls: ClassDecomposition, mu: DiscreteMeasure, nu: DiscreteMeasure) -> dict[int, int]:
    match cls.kind:
        case ClassKind.BOUNDARY:
            return monotone_map_on_class(cls, mu, nu)
        case ClassKind.STRAIGHT:
            return straight_class_map(cls, mu, nu)


def quotient_violations(
    cls: ClassDecomposition, mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float = 1e-12
) -> int:
    """Breakpoints where the source contact CDF falls below the target one.

    Sources enter the arc no later than targets leave it, so the source
    distribution of ``t`` must dominate the target distribution from above.
    """
    sources = cls.side(Side.SOURCE)
    targets = cls.side(Side.TARGET)
    if cls.kind is not ClassKind.BOUNDARY or not sources:
        return 0

    src_w = np.array([mu.weights[m.atom] for m in sources])
    tgt_w = np.array([nu.weights[m.atom] for m in targets])
    src_cdf = build_cdf([m.key[0] for m in sources], src_w / src_w.sum())
    tgt_cdf = build_cdf([m.key[0] for m in targets], tgt_w / tgt_w.sum())

    levels = np.union1d(src_cdf.breakpoints, tgt_cdf.breakpoints)
    return int(sum(src_cdf(v) < tgt_cdf(v) - tol for v in levels))


def hourglass_violations(
    cls: ClassDecomposition, assignment: dict[int, int], tol: float = 1e-12
) -> int:
    """Assigned pairs whose target contact sits before the source contact."""
    if cls.kind is not ClassKind.BOUNDARY:
        return 0
    src_t = {m.atom: m.key[0] for m in cls.side(Side.SOURCE)}
    tgt_t = {m.atom: m.key[0] for m in cls.side(Side.TARGET)}
    return sum(src_t[i] > tgt_t[j] + tol for i, j in assignment.items() if i in src_t)
