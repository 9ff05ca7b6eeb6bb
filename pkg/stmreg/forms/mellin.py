"""
The logarithmic Fourier transform that diagonalizes the partial-wave forms:

    g_ψ(p) = (2π)^{−1/2} ∫ e^{−ipt} e^{2t} ψ(e^t) dt

sampled on a uniform t-grid by the trapezoidal rule. The sum is taken
with an FFT, which evaluates the same trapezoidal sum on the dual grid.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..models import StmRegException, ParameterError
from .charges import RadialCharge


logger = logging.getLogger(__name__)


class GridCoverageError(StmRegException):
    pass


@dataclass(frozen=True)
class MellinGrid:
    n_points: int = 8192
    """Minimum number of samples; raised until the spacing is at most ``max_dt``."""
    pad: float = 4.0
    """Window width over support width; zero padding keeps the autocorrelation unaliased."""
    floor: float = 1e-16
    """Relative size of e^{2t}ψ(e^t) allowed at the support ends."""
    max_dt: float = 0.025
    span: Optional[Tuple[float, float]] = None
    """Support of the profile in t; found by scanning when None."""

    def __post_init__(self):
        if self.n_points < 16:
            raise ParameterError(f'n_points must be at least 16, got {self.n_points}')
        if self.pad < 2.0:
            raise ParameterError(f'pad must be at least 2, got {self.pad}')
        if self.span is not None and not self.span[0] < self.span[1]:
            raise ParameterError(f'span must be an increasing pair, got {self.span}')


@dataclass(frozen=True)
class MellinSamples:
    t_grid: np.ndarray
    p_grid: np.ndarray
    """Dual grid, ascending."""
    values: np.ndarray
    """g_ψ on ``p_grid``."""
    norm_sq: float
    """Trapezoidal ∫|g_ψ|² dp on ``p_grid``."""

    @property
    def dp(self) -> float:
        return float(self.p_grid[1] - self.p_grid[0])


def support_span(psi: RadialCharge, grid: MellinGrid) -> Tuple[float, float]:
    """The t-interval carrying e^{2t}ψ(e^t) to the grid's floor."""
    if grid.span is None:
        return psi.support(grid.floor)
    lo, hi = grid.span
    probe = np.linspace(lo, hi, 4001)
    profile = np.abs(psi.log_profile(probe))
    peak = profile.max()
    edge = max(profile[0], profile[-1])
    if peak > 0 and edge > grid.floor * peak:
        raise GridCoverageError(f'profile is {edge / peak:.3g} of its peak at the ends of {grid.span}')
    return lo, hi


def sample_profile(psi: RadialCharge, grid: MellinGrid, dt: float = None) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    e^{2t}ψ(e^t) on a uniform grid over its support (no padding).

    :return: t nodes, profile values, spacing
    """
    lo, hi = support_span(psi, grid)
    dt = dt or grid.max_dt
    n = int(math.ceil((hi - lo) / dt)) + 1
    t = np.linspace(lo, hi, n)
    return t, psi.log_profile(t), float(t[1] - t[0])


def mellin_diagonalize(psi: RadialCharge, grid: MellinGrid = None) -> MellinSamples:
    grid = grid or MellinGrid()
    if psi.is_zero:
        t = np.linspace(-1.0, 1.0, grid.n_points, endpoint=False)
        p = np.fft.fftshift(2.0 * math.pi * np.fft.fftfreq(t.size, t[1] - t[0]))
        return MellinSamples(t, p, np.zeros(t.size, dtype=complex), 0.0)

    lo, hi = support_span(psi, grid)
    total = grid.pad * (hi - lo)
    n = max(grid.n_points, 2 ** int(math.ceil(math.log2(total / grid.max_dt))))
    dt = total / n
    t = 0.5 * (lo + hi) - 0.5 * total + dt * np.arange(n)
    profile = psi.log_profile(t)

    p = 2.0 * math.pi * np.fft.fftfreq(n, dt)
    values = dt / math.sqrt(2.0 * math.pi) * np.exp(-1j * p * t[0]) * np.fft.fft(profile)
    p = np.fft.fftshift(p)
    values = np.fft.fftshift(values)
    dp = 2.0 * math.pi / (n * dt)
    norm_sq = float(np.sum(np.abs(values) ** 2) * dp)
    logger.debug('mellin samples: span [%.3g, %.3g], n=%d, dt=%.3g, norm %.12g', lo, hi, n, dt, norm_sq)
    return MellinSamples(t, p, values, norm_sq)
