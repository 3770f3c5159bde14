"""Inertia operators ``A = alpha^2 - beta^2 d_xx`` of the L2, H1 and H1-dot metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import GridField, PeriodicGrid, integrate, spectral_derivative

__all__ = ["MetricParams", "L2", "H1", "H1_DOT", "apply_inertia", "invert_inertia",
           "inertia_symbol", "lagrangian"]


@dataclass(frozen=True)
class MetricParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if self.alpha == 0 and self.beta == 0:
            raise ValueError("alpha and beta cannot both vanish")

    @property
    def degenerate(self) -> bool:
        """True for the homogeneous metric, whose operator kills constants."""
        return self.alpha == 0


L2 = MetricParams(1.0, 0.0)
H1 = MetricParams(1.0, 1.0)
H1_DOT = MetricParams(0.0, 1.0)


def inertia_symbol(params: MetricParams, grid: PeriodicGrid) -> np.ndarray:
    """Fourier multiplier ``alpha^2 + beta^2 k^2`` in rfft layout."""
    k = grid.wavenumbers * grid.scale
    return params.alpha ** 2 + params.beta ** 2 * k ** 2


def apply_inertia(params: MetricParams, u: GridField) -> GridField:
    m = params.alpha ** 2 * u
    if params.beta:
        m = m - params.beta ** 2 * spectral_derivative(u, 2)
    return m


def invert_inertia(params: MetricParams, m: GridField, tol: float = 1e-10) -> GridField:
    """Solve ``A u = m``.

    For ``alpha = 0`` the operator annihilates constants, so ``m`` must have
    zero mean and the zero-mean solution is returned.
    """
    grid = m.grid
    M = np.fft.rfft(m.values)
    sym = inertia_symbol(params, grid)
    if params.degenerate:
        mean = M[0].real / grid.n
        scale = max(1.0, float(np.max(np.abs(m.values))))
        if abs(mean) > tol * scale:
            raise ValueError(
                f"-beta^2 u_xx = m is solvable only for zero-mean m on the circle; "
                f"mean(m) = {mean:.3e}")
        sym = sym.copy()
        sym[0] = 1.0
        M[0] = 0.0
    return GridField(grid, np.fft.irfft(M / sym, n=grid.n))


def lagrangian(params: MetricParams, u: GridField) -> float:
    """Reduced Lagrangian ``1/2 int alpha^2 u^2 + beta^2 u_x^2 dx``."""
    ux = spectral_derivative(u, 1)
    return 0.5 * integrate(params.alpha ** 2 * u * u + params.beta ** 2 * ux * ux)
