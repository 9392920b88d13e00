import numpy as np

from core.geometry.obstacle import DiskObstacle
from core.measures.density import Annulus, DensitySpec, Rectangle
from core.measures.discrete_measure import DiscreteMeasure
from core.point import Point


class TestMeasures:
    def setup_method(self, method):
        self.disk = DiskObstacle(center_point=Point(0.0, 0.0), radius=1.0)
        self.measure = DiscreteMeasure(
            np.array([[-2.0, 0.0], [0.0, 2.0], [2.0, 1.0]]), np.array([0.5, 0.25, 0.25])
        )
        self.left_box = Rectangle((-4.0, -2.0), (-1.5, 2.0))
        self.ring = Annulus(1.5, 3.0)
        self.uniform_spec = DensitySpec(self.left_box, 'uniform', 50, 7)
        self.radial_spec = DensitySpec(self.ring, 'radial-linear', 200, 8)
