import logging
from dataclasses import dataclass

import numpy as np

from core.errors import TransportError
from core.measures.discrete_measure import DiscreteMeasure
from core.monge.class_maps import class_map
from core.monge.decomposition import ClassDecomposition
from core.rays.relation import RayNodes

logger = logging.getLogger(__name__)

FIXED = -1


@dataclass(frozen=True, eq=False)
class MongeMap:
    """``assignment[i]`` is the target atom of source atom ``i``.

    ``provenance[i]`` is the class label that produced the pair, or ``FIXED``
    for atoms the plan leaves in place.
    """

    assignment: np.ndarray
    provenance: np.ndarray

    def __len__(self) -> int:
        return len(self.assignment)

    def images(self, nu: DiscreteMeasure) -> np.ndarray:
        return nu.atoms[self.assignment]


def build_class_maps(
    classes: list[ClassDecomposition], mu: DiscreteMeasure, nu: DiscreteMeasure
) -> dict[int, dict[int, int]]:
    return {cls.label: class_map(cls, mu, nu) for cls in classes}


def glue_maps(
    class_maps: dict[int, dict[int, int]],
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    nodes: RayNodes,
) -> MongeMap:
    assignment = np.full(len(mu), -1)
    provenance = np.full(len(mu), FIXED)

    for label, pairs in sorted(class_maps.items()):
        for i, j in pairs.items():
            if assignment[i] >= 0:
                raise TransportError(f'source atom {i} is assigned by two classes')
            assignment[i] = j
            provenance[i] = label

    # atoms outside every ray stay where the plan keeps them
    plan = nodes.plan
    for g, path in enumerate(nodes.paths):
        if path.total_length == 0:
            i, j = int(plan.rows[g]), int(plan.cols[g])
            if assignment[i] < 0:
                assignment[i] = j

    missing = np.flatnonzero(assignment < 0)
    if len(missing):
        head = missing[:10].tolist()
        raise TransportError(f'{len(missing)} source atoms left unassigned: {head}')
    if len(mu) == len(nu) and len(np.unique(assignment)) != len(assignment):
        raise TransportError('glued map sends two source atoms to the same target')

    logger.info(
        'glued %d class maps, %d fixed points',
        len(class_maps),
        int(np.sum(provenance == FIXED)),
    )
    return MongeMap(assignment=assignment, provenance=provenance)
