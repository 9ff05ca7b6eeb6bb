"""
The singular potential G^λ_j ξ of a separable Gaussian charge at N = 2,
along a ray that approaches the coincidence plane x_j = x₀.

In momentum space the relative coordinate r = |x₀ − x_j| sees a Yukawa
kernel, so with ξ(X, x₂) = A·ξ₀(X)ξ₁(x₂) the potential reduces to

    G(r) = (A/r)(2/π) ∫∫ p²k² ĝ₀(p)ĝ₁(k) j₀(p|X|) j₀(k|x₂|) e^{−√μ r √(p²/(M+1) + k² + λ)} dp dk

with ĝᵢ(p) = wᵢ³e^{−wᵢ²p²/2}, the unitary transform of e^{−|x|²/(2wᵢ²)}.
Near the plane G(r) = ξ(X, x₂)/r − (Γ_diag ξ)(X, x₂) + O(r). Only G_j is
evaluated, so the off-diagonal Γ contributions of the other planes never
enter.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from serde import serialize, deserialize

from .models import StmRegException, ParameterError, BoundReport, DerivedMasses, QuadratureSpec, DEFAULT_QUAD
from .kernels import quad_checked


logger = logging.getLogger(__name__)

FIT_R_MAX = 0.1
FIT_MIN_SAMPLES = 4
FIT_MAX_COND = 1e10
SINGULAR_RTOL = 0.01
YUKAWA_RTOL = 1e-6
_NODES = 160
_CUT = 9.0


class FitError(StmRegException):
    pass


@serialize
@deserialize
@dataclass(frozen=True)
class SeparableCharge:
    """
    ξ = amplitude · Π e^{−|x_b|²/(2w_b²)} over coordinate blocks. Block 0 is
    the pair coordinate on the plane; the remaining blocks are spectator
    bosons and share one width.
    """
    widths: Tuple[float, ...]
    amplitude: float = 1.0

    def __post_init__(self):
        if len(self.widths) < 2:
            raise ParameterError(f'a separable charge needs a pair block and a spectator block, got {self.widths}')
        if any(not w > 0 for w in self.widths):
            raise ParameterError(f'widths must be positive, got {self.widths}')
        if len(set(self.widths[1:])) > 1:
            raise ParameterError(f'exchangeable spectator blocks must share a width, got {self.widths[1:]}')
        if not math.isfinite(self.amplitude):
            raise ParameterError(f'amplitude must be finite, got {self.amplitude}')


@serialize
@deserialize
@dataclass(frozen=True)
class PotentialSample:
    r: float
    value: float
    lam: float


def _point(x, label: str) -> np.ndarray:
    if x is None:
        return np.zeros(3)
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ParameterError(f'{label} must be a point in R^3, got shape {x.shape}')
    return x


def _check_two_body(charge: SeparableCharge):
    if len(charge.widths) != 2:
        raise ParameterError('direct potential evaluation is implemented for N = 2 (two blocks) only')


def contact_value(charge: SeparableCharge, contact_point=None, spectator=None) -> float:
    """ξ at the contact configuration, the coefficient of 1/r near the plane."""
    _check_two_body(charge)
    c = _point(contact_point, 'contact_point')
    x2 = _point(spectator, 'spectator')
    w0, w1 = charge.widths
    return charge.amplitude * math.exp(-c.dot(c) / (2.0 * w0 * w0)) * math.exp(-x2.dot(x2) / (2.0 * w1 * w1))


class _ReducedIntegral:
    """Tensor Gauss–Legendre nodes for the (p, k) double integral."""

    def __init__(self, charge: SeparableCharge, M: float, contact_point, spectator):
        _check_two_body(charge)
        self.masses = DerivedMasses.from_mass(M)
        self.amplitude = charge.amplitude
        x, w = leggauss(_NODES)
        blocks = []
        for width, point in zip(charge.widths, (contact_point, spectator)):
            top = _CUT / width
            k = 0.5 * top * (x + 1.0)
            weight = 0.5 * top * w
            distance = float(np.linalg.norm(_point(point, 'position')))
            profile = weight * k * k * width ** 3 * np.exp(-0.5 * width * width * k * k) * np.sinc(k * distance / math.pi)
            blocks.append((k, profile))
        (p, fp), (k, fk) = blocks
        self.weights = np.outer(fp, fk) * (2.0 / math.pi)
        self.energy = np.add.outer(p * p / (M + 1.0), k * k)

    def value(self, r: float, lam: float) -> float:
        decay = np.exp(-math.sqrt(self.masses.mu) * r * np.sqrt(self.energy + lam))
        return self.amplitude / r * float(np.sum(self.weights * decay))

    def gamma_diag(self, lam: float) -> float:
        return math.sqrt(self.masses.mu) * self.amplitude * float(np.sum(self.weights * np.sqrt(self.energy + lam)))


def _check_lambda(lam: float):
    if not (lam > 0 and math.isfinite(lam)):
        raise ParameterError(f'lambda must be positive and finite, got {lam}')


def potential_on_ray(charge: SeparableCharge, lam: float, M: float, r_list: Sequence[float],
                     contact_point=None, spectator=None, workers: int = 1) -> List[PotentialSample]:
    """
    G^λ_j ξ at distances r from the plane, with the pair coordinate at
    ``contact_point`` and the other boson at ``spectator`` (both default to
    the charge centre).
    """
    _check_lambda(lam)
    if any(not r > 0 for r in r_list):
        raise ParameterError('the potential is evaluated off the coincidence plane only (r > 0)')
    reduced = _ReducedIntegral(charge, M, contact_point, spectator)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        values = list(pool.map(lambda r: reduced.value(float(r), lam), r_list))
    return [PotentialSample(r=float(r), value=v, lam=lam) for r, v in zip(r_list, values)]


def gamma_diag_apply(charge: SeparableCharge, lam: float, M: float, contact_point=None, spectator=None) -> float:
    """(Γ^{j,λ}_diag ξ) at the contact configuration: the √(…+λ)-weighted transform of ξ."""
    _check_lambda(lam)
    return _ReducedIntegral(charge, M, contact_point, spectator).gamma_diag(lam)


def asymptotic_fit(samples: Sequence[PotentialSample], contact: float) -> Tuple[float, float, BoundReport]:
    """
    Least squares G(r) ≈ c₋₁/r + c₀ + c₁r on the samples with r ≤ 0.1; the
    report compares c₋₁ with the contact value at 1%.

    :return: c₋₁, c₀ and the report
    """
    near = sorted((s for s in samples if s.r <= FIT_R_MAX), key=lambda s: s.r)
    if len(near) < FIT_MIN_SAMPLES:
        raise FitError(f'need at least {FIT_MIN_SAMPLES} samples with r <= {FIT_R_MAX}, got {len(near)}')
    r = np.array([s.r for s in near])
    if r[-1] < 10.0 * r[0]:
        raise FitError(f'samples must span a decade, got r in [{r[0]:g}, {r[-1]:g}]')
    design = np.column_stack([1.0 / r, np.ones_like(r), r])
    scaled = design / np.linalg.norm(design, axis=0)
    cond = float(np.linalg.cond(scaled))
    if not cond <= FIT_MAX_COND:
        raise FitError(f'ill-conditioned fit, condition number {cond:.3g}')
    coef, *_ = np.linalg.lstsq(design, np.array([s.value for s in near]), rcond=None)
    singular, constant = float(coef[0]), float(coef[1])
    report = BoundReport.equality('asymptotic_singular_coeff', singular, contact, SINGULAR_RTOL * abs(contact),
                                  context={'const_term': constant, 'samples': float(len(near)),
                                           'r_min': float(r[0]), 'r_max': float(r[-1]), 'cond': cond})
    logger.debug('asymptotic fit: c_-1=%.10g (contact %.10g), c_0=%.10g', singular, contact, constant)
    return singular, constant, report


def yukawa_transform_check(a: float, x: float, quad: QuadratureSpec = DEFAULT_QUAD) -> BoundReport:
    """
    ∫e^{ik·x}/(k²+a²)d³k = (4π/|x|)∫_0^∞ k sin(k|x|)/(k²+a²)dk against
    2π²e^{−a|x|}/|x|. The tail beyond k₀ goes to QUADPACK's Fourier
    integrator, which sums between zeros with extrapolation.
    """
    if not a >= 0:
        raise ParameterError(f'a must be non-negative, got {a}')
    if not x > 0:
        raise ParameterError(f'|x| must be positive, got {x}')
    k0 = max(10.0, 10.0 * a)

    if a == 0:
        def head(k):
            return x * float(np.sinc(k * x / math.pi))
    else:
        def head(k):
            return k * math.sin(k * x) / (k * k + a * a)

    near, _ = quad_checked(head, 0.0, k0, quad, 'yukawa head')
    # the Fourier integrator only honours an absolute tolerance
    tail_quad = replace(quad, atol=max(quad.atol, 1e-10))
    far, _ = quad_checked(lambda k: k / (k * k + a * a), k0, np.inf, tail_quad, 'yukawa tail',
                          weight='sin', wvar=x)
    numeric = 4.0 * math.pi / x * (near + far)
    closed = 2.0 * math.pi ** 2 * math.exp(-a * x) / x
    return BoundReport.equality(f'yukawa[a={a:g},x={x:g}]', numeric, closed, YUKAWA_RTOL * closed,
                                context={'a': a, 'x': x})
