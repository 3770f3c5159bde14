"""Periodic grids, Fourier analysis and spectral differentiation.

Everything downstream works on real fields sampled on a uniform periodic grid.
The discrete transform uses the convention

    f(x_j) = sum_k c_k exp(i k' x_j),   k' = 2 pi k / length,

with ``k`` running over ``-n/2, ..., n/2 - 1`` so ``c_k`` are the coefficients
of the band-limited trigonometric interpolant.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PeriodicGrid",
    "GridField",
    "Spectrum",
    "make_grid",
    "analyze",
    "synthesize",
    "spectral_derivative",
    "trig_interpolate",
    "shift",
    "dealias",
    "integrate",
]


@dataclass(frozen=True)
class PeriodicGrid:
    n: int
    length: float = 2 * np.pi

    def __post_init__(self):
        if int(self.n) != self.n:
            raise ValueError(f"grid size must be an integer, got {self.n!r}")
        if self.n % 2:
            raise ValueError(f"grid size must be even, got n={self.n}")
        if self.n < 8:
            raise ValueError(f"grid size must be at least 8, got n={self.n}")
        if not self.length > 0:
            raise ValueError(f"circumference must be positive, got {self.length}")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing

    @property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers in rfft order, ``0 .. n/2``."""
        return np.arange(self.n // 2 + 1)

    @property
    def scale(self) -> float:
        """Factor turning an integer wavenumber into a physical one."""
        return 2 * np.pi / self.length

    def field(self, values) -> "GridField":
        return GridField(self, values)

    def evaluate(self, func) -> "GridField":
        """Sample a callable of ``x`` on the grid."""
        return GridField(self, func(self.points))

    def zeros(self) -> "GridField":
        return GridField(self, np.zeros(self.n))


def make_grid(n: int, length: float = 2 * np.pi) -> PeriodicGrid:
    return PeriodicGrid(n, length)


@dataclass(frozen=True, eq=False)
class GridField:
    """Real samples of a periodic function on ``grid``.

    Fields support the usual arithmetic with scalars and with other fields on
    the same grid; products are plain pointwise products (no dealiasing).
    """

    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"field has shape {vals.shape}, expected ({self.grid.n},)")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise ValueError(f"non-finite field value at grid index {bad}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def _coerce(self, other):
        if isinstance(other, GridField):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return GridField(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridField(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return GridField(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return GridField(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridField(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return GridField(self.grid, -self.values)

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> float:
        return float(np.mean(self.values))


def check_same_grid(*fields) -> PeriodicGrid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError(f"grid mismatch: {grid} vs {f.grid}")
    return grid


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients indexed by ``k = -n/2 .. n/2 - 1`` (ascending)."""

    grid: PeriodicGrid
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        if c.shape != (self.grid.n,):
            raise ValueError(
                f"spectrum has shape {c.shape}, expected ({self.grid.n},)")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def wavenumbers(self) -> np.ndarray:
        n = self.grid.n
        return np.arange(-n // 2, n // 2)

    def __getitem__(self, k: int) -> complex:
        n = self.grid.n
        if not -n // 2 <= k < n // 2:
            raise IndexError(f"wavenumber {k} outside [-{n // 2}, {n // 2})")
        return complex(self.coefficients[k + n // 2])


def analyze(f: GridField) -> Spectrum:
    c = np.fft.fftshift(np.fft.fft(f.values)) / f.grid.n
    return Spectrum(f.grid, c)


def synthesize(spec: Spectrum) -> GridField:
    n = spec.grid.n
    vals = np.fft.ifft(np.fft.ifftshift(spec.coefficients)) * n
    return GridField(spec.grid, vals.real)


# -- array-level kernels (rfft layout), shared by the other modules ----------

def derivative_symbol(grid: PeriodicGrid, order: int) -> np.ndarray:
    """Multiplier of the ``order``-th derivative in rfft layout.

    The Nyquist entry is zero for odd orders so that the discrete operator is
    real and skew-symmetric.
    """
    k = grid.wavenumbers * grid.scale
    sym = (1j * k) ** order
    if order % 2:
        sym[-1] = 0.0
    return sym


def dealias_mask(grid: PeriodicGrid) -> np.ndarray:
    return (grid.wavenumbers <= grid.n / 3).astype(float)


def diff_array(values: np.ndarray, grid: PeriodicGrid, order: int = 1) -> np.ndarray:
    if order == 0:
        return np.array(values, dtype=float)
    return np.fft.irfft(np.fft.rfft(values) * derivative_symbol(grid, order), n=grid.n)


def dealias_array(values: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    return np.fft.irfft(np.fft.rfft(values) * dealias_mask(grid), n=grid.n)


def spectral_derivative(f: GridField, order: int = 1) -> GridField:
    if order < 0 or int(order) != order:
        raise ValueError(f"derivative order must be a non-negative integer, got {order}")
    return GridField(f.grid, diff_array(f.values, f.grid, int(order)))


def dealias(spec: Spectrum) -> Spectrum:
    """Two-thirds rule: zero every coefficient with ``|k| > n/3``."""
    keep = np.abs(spec.wavenumbers) <= spec.grid.n / 3
    return Spectrum(spec.grid, np.where(keep, spec.coefficients, 0.0))


def trig_interpolate(f: GridField, targets) -> np.ndarray:
    """Evaluate the band-limited interpolant of ``f`` at arbitrary points.

    The Nyquist mode is split symmetrically between ``+-n/2`` so the
    interpolant is real and reproduces the samples exactly.
    """
    grid = f.grid
    xs = np.mod(np.asarray(targets, dtype=float), grid.length)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    n = grid.n
    F = np.fft.rfft(f.values) / n
    weights = np.full(n // 2 + 1, 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    k = grid.wavenumbers * grid.scale
    out = np.empty(xs.shape)
    # F[-1] is real for real input, so Re(F e^{ikx}) is already the cosine
    flat = xs.ravel()
    res = out.ravel()
    chunk = 4096  # bounds the size of the phase matrix
    for start in range(0, flat.size, chunk):
        phase = np.exp(1j * np.outer(flat[start:start + chunk], k))
        res[start:start + chunk] = (phase @ (weights * F)).real
    out = res.reshape(xs.shape)
    return float(out[0]) if scalar else out


def shift(f: GridField, delta: float) -> GridField:
    """Return ``g(x) = f(x - delta)`` for the band-limited interpolant of ``f``.

    Equivalent to ``trig_interpolate(f, points - delta)`` but computed with a
    phase factor in Fourier space.
    """
    grid = f.grid
    k = grid.wavenumbers * grid.scale
    F = np.fft.rfft(f.values)
    phase = np.exp(-1j * k * delta)
    phase[-1] = np.cos(k[-1] * delta)
    return GridField(grid, np.fft.irfft(F * phase, n=grid.n))


def integrate(f: GridField) -> float:
    """Rectangle rule over one period (spectrally accurate when periodic)."""
    return float(np.sum(f.values) * f.grid.spacing)
