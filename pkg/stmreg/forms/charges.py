"""
Analytic radial trial functions ψ(k) for partial-wave form evaluation.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple, Sequence

import numpy as np
from serde import serialize, deserialize

from ..models import ParameterError


class ChargeFamily(Enum):
    gaussian = 'gaussian'
    """terms (c, a): c·exp(−a k²)"""
    poly_gaussian = 'poly_gaussian'
    """terms (c, n, a): c·k^n·exp(−a k²)"""
    log_gaussian = 'log_gaussian'
    """terms (c, m, s): c·exp(−(ln k − m)²/(2s²))/k²"""


TERM_ARITY = {
    ChargeFamily.gaussian: 2,
    ChargeFamily.poly_gaussian: 3,
    ChargeFamily.log_gaussian: 3,
}


@serialize
@deserialize
@dataclass(frozen=True)
class RadialCharge:
    """
    The radial profile ψ of one (ℓ, m) component. ``params`` is a flat tuple
    of family terms, so a mixture is just a longer tuple.
    """
    family: ChargeFamily
    params: Tuple[float, ...]
    ell: int
    m: int = 0

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 0:
            raise ParameterError(f'ell must be a non-negative integer, got {self.ell}')
        if abs(self.m) > self.ell:
            raise ParameterError(f'|m| must not exceed ell, got m={self.m}, ell={self.ell}')
        arity = TERM_ARITY[self.family]
        if len(self.params) == 0 or len(self.params) % arity:
            raise ParameterError(f'{self.family.value} takes terms of {arity} numbers, got {self.params}')
        for term in self.terms():
            if self.family is ChargeFamily.gaussian and not term[1] > 0:
                raise ParameterError(f'gaussian exponent must be positive, got {term[1]}')
            if self.family is ChargeFamily.poly_gaussian and not (term[1] >= 0 and term[2] > 0):
                raise ParameterError(f'poly_gaussian needs n >= 0 and a > 0, got {term}')
            if self.family is ChargeFamily.log_gaussian and not term[2] > 0:
                raise ParameterError(f'log_gaussian width must be positive, got {term[2]}')

    def terms(self) -> List[Tuple[float, ...]]:
        arity = TERM_ARITY[self.family]
        return [tuple(self.params[i:i + arity]) for i in range(0, len(self.params), arity)]

    @property
    def key(self) -> Tuple[int, int]:
        return self.ell, self.m

    @property
    def is_zero(self) -> bool:
        return all(term[0] == 0 for term in self.terms())

    def __call__(self, k):
        """ψ(k) for k ≥ 0."""
        k = np.asarray(k, dtype=float)
        with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
            log_k = np.log(k)
            return self._from_log(log_k, np.zeros_like(k))

    def log_profile(self, t):
        """e^{2t}ψ(e^t), evaluated in log space so it never overflows."""
        t = np.asarray(t, dtype=float)
        return self._from_log(t, 2.0 * t)

    def _from_log(self, t, shift):
        total = np.zeros(np.shape(t))
        for term in self.terms():
            c = term[0]
            if c == 0:
                continue
            if self.family is ChargeFamily.gaussian:
                exponent = shift - term[1] * np.exp(2.0 * t)
            elif self.family is ChargeFamily.poly_gaussian:
                power = term[1] * t if term[1] else 0.0
                exponent = shift + power - term[2] * np.exp(2.0 * t)
            else:
                exponent = shift - (t - term[1]) ** 2 / (2.0 * term[2] ** 2) - 2.0 * t
            total = total + c * np.exp(exponent)
        return np.where(np.isnan(total), 0.0, total)

    def support(self, floor: float = 1e-16) -> Tuple[float, float]:
        """
        A t-interval outside of which |e^{2t}ψ(e^t)| stays below ``floor``
        times its peak, found on a coarse scan.
        """
        t = np.linspace(-80.0, 80.0, 16001)
        profile = np.abs(self.log_profile(t))
        peak = profile.max()
        if peak == 0:
            return -1.0, 1.0
        inside = np.nonzero(profile > floor * peak)[0]
        lo, hi = inside[0], inside[-1]
        if lo == 0 or hi == t.size - 1:
            raise ParameterError('charge profile is not localized within |ln k| < 80')
        return float(t[max(lo - 1, 0)]), float(t[min(hi + 1, t.size - 1)])


def combine_charges(charges: Sequence[RadialCharge]) -> RadialCharge:
    """Sum of charges sharing (ℓ, m) and family, as one mixture."""
    first = charges[0]
    params: List[float] = []
    for charge in charges:
        if charge.key != first.key or charge.family is not first.family:
            raise ParameterError('only charges with the same (ell, m) and family can be summed')
        params.extend(charge.params)
    return RadialCharge(first.family, tuple(params), first.ell, first.m)


def random_charges(seed: int, count: int = 20, ell_max: int = 4,
                   max_components: int = 2, max_terms: int = 3) -> List[List[RadialCharge]]:
    """
    Reproducible random Gaussian mixtures. Each trial holds up to
    ``max_components`` distinct (ℓ, m) components.
    """
    rng = np.random.default_rng(seed)
    trials = []
    for _ in range(count):
        n_components = int(rng.integers(1, max_components + 1))
        keys = set()
        components = []
        while len(components) < n_components:
            ell = int(rng.integers(0, ell_max + 1))
            m = int(rng.integers(-ell, ell + 1))
            if (ell, m) in keys:
                continue
            keys.add((ell, m))
            n_terms = int(rng.integers(1, max_terms + 1))
            params = []
            for _ in range(n_terms):
                params.append(float(rng.normal()))
                params.append(float(math.exp(rng.uniform(math.log(0.3), math.log(3.0)))))
            components.append(RadialCharge(ChargeFamily.gaussian, tuple(params), ell, m))
        trials.append(components)
    return trials
