"""
The position-dependent three-body coupling and the effective two-body
strength it leaves after the regularizing subtraction.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from serde import serialize, deserialize

from ..models import ParameterError, PhysicalParams


class ProfileKind(Enum):
    indicator = 'indicator'
    """θ(r) = 1 for r < b, 0 otherwise."""
    exponential = 'exponential'
    """θ(r) = e^{−r/b}."""


@serialize
@deserialize
@dataclass(frozen=True)
class RegularizerProfile:
    kind: ProfileKind = ProfileKind.indicator
    b: float = 1.0

    def __post_init__(self):
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ParameterError(f'profile range b must be positive and finite, got {self.b}')

    def theta(self, r: float) -> float:
        if r < 0:
            raise ParameterError(f'distance must be non-negative, got {r}')
        if self.kind is ProfileKind.indicator:
            return 1.0 if r < self.b else 0.0
        return math.exp(-r / self.b)

    def within_envelope(self, r: float) -> bool:
        """1 − r/b ≤ θ(r) ≤ 1 + r/b."""
        value = self.theta(r)
        return 1.0 - r / self.b <= value <= 1.0 + r / self.b


def _check_profile(params: PhysicalParams, profile: RegularizerProfile):
    if profile.b != params.b:
        raise ParameterError(f'profile range b={profile.b} differs from the model b={params.b}')


def alpha_tilde(r: float, params: PhysicalParams, profile: RegularizerProfile) -> float:
    """α̃(r) = α + (N−1)γ(θ(r) − 1)/r."""
    if not r > 0:
        raise ParameterError(f'r must be positive, got {r}')
    _check_profile(params, profile)
    return params.alpha + (params.N - 1) * params.gamma * (profile.theta(r) - 1.0) / r


def alpha_tilde_range(params: PhysicalParams, profile: RegularizerProfile) -> Tuple[float, float]:
    """
    (inf, sup) of α̃ over r > 0. Both profiles reach α − (N−1)γ/b from
    above (at r = b for the indicator, as r → 0 for the exponential) and
    α near the origin or at infinity.
    """
    _check_profile(params, profile)
    return params.alpha - (params.N - 1) * params.gamma / params.b, params.alpha


def running_coupling(positions, i: int, params: PhysicalParams, profile: RegularizerProfile) -> float:
    """
    β_i = α + γ Σ_{j≠i} θ(|x_j − x₀|)/|x_j − x₀|.

    :param positions: array of shape (N+1, 3); row 0 is the impurity x₀,
                      rows 1..N the bosons
    :param i: boson index, 1..N
    """
    _check_profile(params, profile)
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 2 or positions.shape[0] != params.N + 1:
        raise ParameterError(f'expected {params.N + 1} positions (impurity first), got shape {positions.shape}')
    if not 1 <= i <= params.N:
        raise ParameterError(f'boson index must lie in 1..{params.N}, got {i}')
    distances = np.linalg.norm(positions[1:] - positions[0], axis=1)
    others = np.delete(distances, i - 1)
    if np.any(others == 0):
        raise ParameterError('a boson other than i coincides with the impurity')
    return params.alpha + params.gamma * sum(profile.theta(float(d)) / float(d) for d in others)
