import json
from pathlib import Path

PROBLEMS = Path(__file__).resolve().parents[2] / 'problems'

WRAP = PROBLEMS / 'wrap.json'
IDENTITY = PROBLEMS / 'identity.json'
TWO_RAYS = PROBLEMS / 'two_rays.json'
DENSITY = PROBLEMS / 'density.json'
POLYGON = PROBLEMS / 'polygon.json'


def problem_text(**overrides) -> str:
    """A small valid problem with top-level fields replaced by ``overrides``."""
    data = {
        'obstacle': {'type': 'disk', 'center': [0, 0], 'radius': 1},
        'mu': {'atoms': [[-2, 0.5], [-3, -1]]},
        'nu': {'atoms': [[2, -0.5], [3, 1]]},
    }
    data.update(overrides)
    return json.dumps(data)


class TestCli:
    def setup_method(self, method):
        self.wrap = WRAP
        self.identity = IDENTITY
        self.two_rays = TWO_RAYS
