class GeometryError(ValueError):
    """A point, arc length or obstacle description is not admissible."""


class ProblemError(ValueError):
    """A problem file cannot be parsed or fails validation."""


class TransportError(ValueError):
    """Marginals, potentials or class partitions are inconsistent."""


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException) -> None:
        super().__init__(f'stage {stage!r} failed: {cause}')
        self.stage = stage
        self.cause = cause
