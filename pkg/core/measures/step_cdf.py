from dataclasses import dataclass

import numpy as np

from core.errors import TransportError

MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StepCDF:
    breakpoints: np.ndarray
    cumulative: np.ndarray

    def __post_init__(self) -> None:
        if np.any(np.diff(self.cumulative) < 0):
            raise TransportError('cumulative masses must be nondecreasing')
        if abs(self.cumulative[-1] - 1.0) > MASS_TOL:
            raise TransportError(f'cumulative mass ends at {self.cumulative[-1]:.15g}, expected 1')

    def __call__(self, value: float) -> float:
        k = np.searchsorted(self.breakpoints, value, side='right')
        return 0.0 if k == 0 else float(self.cumulative[k - 1])


def build_cdf(values, weights) -> StepCDF:
    values = np.asarray(values, dtype=float).reshape(-1)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if len(values) != len(weights) or len(values) == 0:
        raise TransportError(f'{len(values)} values but {len(weights)} weights')
    if np.any(weights < 0):
        idx = int(np.flatnonzero(weights < 0)[0])
        raise TransportError(f'weight {idx} is negative ({weights[idx]})')

    order = np.argsort(values, kind='stable')
    breakpoints, inverse = np.unique(values[order], return_inverse=True)
    mass = np.bincount(inverse.reshape(-1), weights=weights[order], minlength=len(breakpoints))
    cumulative = np.cumsum(mass)
    return StepCDF(breakpoints, cumulative)


def quantile(cdf: StepCDF, q: float) -> float:
    """Left-continuous generalized inverse ``inf {v : CDF(v) >= q}``."""
    if not 0.0 <= q <= 1.0:
        raise TransportError(f'quantile level {q} outside [0, 1]')
    # NOTE: levels within rounding of a jump height belong to that jump
    k = int(np.searchsorted(cdf.cumulative, q - MASS_TOL, side='left'))
    return float(cdf.breakpoints[min(k, len(cdf.breakpoints) - 1)])
