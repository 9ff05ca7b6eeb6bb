"""
Shared parameter records, verification reports and the exception base.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, NewType

from serde import serialize, deserialize


class StmRegException(Exception):
    def __init__(self, msg, **kwargs):
        self.exit_code = kwargs.get('exit_code', 1)
        super().__init__(msg)


class ParameterError(StmRegException):
    """
    A parameter violates the documented domain of an operation.
    Surfaced by the CLI as a usage error.
    """
    def __init__(self, msg, **kwargs):
        kwargs.setdefault('exit_code', 2)
        super().__init__(msg, **kwargs)


class SubcriticalError(ParameterError):
    """The three-body coupling does not exceed the critical value γ_c."""
    pass


CheckName = NewType('CheckName', str)
"""An identifying string for one verified inequality or identity."""
Tolerance = NewType('Tolerance', float)
"""Non-negative slack allowed on the margin of a check."""


@dataclass(frozen=True)
class DerivedMasses:
    mu: float
    """Reduced mass M/(M+1)."""
    eta: float
    """Modified reduced mass (M+1)/(M+2)."""

    @classmethod
    def from_mass(cls, M: float) -> 'DerivedMasses':
        if not M > 0:
            raise ParameterError(f'impurity mass must be positive, got M={M}')
        return cls(mu=M / (M + 1.0), eta=(M + 1.0) / (M + 2.0))

    @property
    def ratio_sqrt(self) -> float:
        """√(μ/η), equal to √(M(M+2))/(M+1)."""
        return math.sqrt(self.mu / self.eta)


@serialize
@deserialize
@dataclass(frozen=True)
class PhysicalParams:
    """
    The tuple (N, M, γ, α, b, λ) defining the model. ``lam`` is the
    spectral shift λ (``lambda`` is reserved in Python).
    """
    N: int
    M: float
    gamma: float
    alpha: float = 0.0
    b: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ParameterError(f'boson count must be an integer >= 2, got N={self.N}')
        for name in ('M', 'gamma', 'b', 'lam'):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ParameterError(f'{name} must be positive and finite, got {value}')
        if not math.isfinite(self.alpha):
            raise ParameterError(f'alpha must be finite, got {self.alpha}')

    @property
    def masses(self) -> DerivedMasses:
        return DerivedMasses.from_mass(self.M)

    def echo(self) -> Dict[str, float]:
        return {'N': float(self.N), 'M': self.M, 'gamma': self.gamma,
                'alpha': self.alpha, 'b': self.b, 'lambda': self.lam}


@dataclass(frozen=True)
class QuadratureSpec:
    rtol: float = 1e-11
    atol: float = 1e-13
    max_subdiv: int = 200
    k_cutoff: float = 40.0
    """Truncation radius for semi-infinite radial integrals."""

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ParameterError('quadrature tolerances must be positive')
        if self.max_subdiv < 1:
            raise ParameterError('max_subdiv must be at least 1')
        if not self.k_cutoff > 0:
            raise ParameterError('k_cutoff must be positive')


DEFAULT_QUAD = QuadratureSpec()


@serialize
@deserialize
@dataclass(frozen=True)
class BoundReport:
    """
    One verified inequality or identity.

    ``passed`` holds exactly when ``margin >= -tolerance``.
    """
    name: CheckName
    lhs: float
    rhs: float
    margin: float
    tolerance: Tolerance
    passed: bool
    context: Dict[str, float] = field(default_factory=dict)
    detail: str = ''

    @classmethod
    def inequality(cls, name: str, lhs: float, rhs: float, tolerance: float,
                   context: Dict[str, float] = None, detail: str = '') -> 'BoundReport':
        """Checks ``lhs <= rhs``."""
        margin = rhs - lhs
        return cls(CheckName(name), float(lhs), float(rhs), float(margin),
                   Tolerance(float(tolerance)), bool(margin >= -tolerance),
                   dict(context or {}), detail)

    @classmethod
    def equality(cls, name: str, lhs: float, rhs: float, tolerance: float,
                 context: Dict[str, float] = None, detail: str = '') -> 'BoundReport':
        """Checks ``|lhs - rhs| <= tolerance``."""
        margin = -abs(lhs - rhs)
        if math.isnan(margin):
            margin = -math.inf
        return cls(CheckName(name), float(lhs), float(rhs), float(margin),
                   Tolerance(float(tolerance)), bool(margin >= -tolerance),
                   dict(context or {}), detail)

    @classmethod
    def combine(cls, name: str, reports: Iterable['BoundReport'],
                context: Dict[str, float] = None) -> 'BoundReport':
        """
        Fold several sub-checks into one report. ``lhs`` counts the failed
        sub-checks and ``detail`` names them.
        """
        reports = list(reports)
        failed = [r for r in reports if not r.passed]
        merged = dict(context or {})
        for r in reports:
            merged[f'{r.name}.margin'] = r.margin
        detail = '; '.join(f'{r.name}: {r.detail}' if r.detail else r.name for r in failed)
        return cls(CheckName(name), float(len(failed)), 0.0, -float(len(failed)),
                   Tolerance(0.0), not failed, merged, detail)
