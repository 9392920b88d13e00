import logging
from dataclasses import dataclass

import numpy as np

from core.rays.relation import RayRelation

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TransportSets:
    """Boolean node masks: interior ``T``, extended ``T_e`` and the ray endpoints."""

    T: np.ndarray
    T_e: np.ndarray
    a_set: np.ndarray
    b_set: np.ndarray

    def consistency_errors(self) -> list[str]:
        errors = []
        if np.any(self.T_e != (self.T | self.a_set | self.b_set)):
            errors.append('T_e differs from T with a and b added')
        if np.any(self.T & (self.a_set | self.b_set)):
            errors.append('an interior node is also a ray endpoint')
        if np.any(self.a_set & self.b_set):
            errors.append('a node is both an initial and a final point')
        return errors


def transport_sets(rel: RayRelation) -> TransportSets:
    strict = rel.strict
    has_succ = strict.any(axis=1)
    has_pred = strict.any(axis=0)

    T = has_succ & has_pred
    T_e = has_succ | has_pred
    sets = TransportSets(T=T, T_e=T_e, a_set=T_e & ~has_pred, b_set=T_e & ~has_succ)
    logger.info(
        'transport sets: |T|=%d |T_e|=%d |a|=%d |b|=%d',
        int(T.sum()),
        int(T_e.sum()),
        int(sets.a_set.sum()),
        int(sets.b_set.sum()),
    )
    return sets
