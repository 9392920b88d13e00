import logging

import numpy as np

from core.geometry.geodesic import pairwise_lengths
from core.geometry.obstacle import ConvexObstacle
from core.measures.discrete_measure import DiscreteMeasure

logger = logging.getLogger(__name__)


def cost_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure, obstacle: ConvexObstacle) -> np.ndarray:
    """Obstacle distances between every source atom and every target atom."""
    mu.check_admissible(obstacle, 'mu atom')
    nu.check_admissible(obstacle, 'nu atom')
    cost = pairwise_lengths(obstacle, mu.atoms, nu.atoms)

    diff = mu.atoms[:, None, :] - nu.atoms[None, :, :]
    euclid = np.hypot(diff[..., 0], diff[..., 1])
    logger.info(
        'cost matrix %dx%d, %.1f%% of pairs wrap the obstacle',
        cost.shape[0],
        cost.shape[1],
        100.0 * np.mean(cost > euclid),
    )
    return cost
