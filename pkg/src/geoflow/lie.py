"""Adjoint and coadjoint operators of Diff+(S^1) and of the Virasoro algebra.

Vector fields ``u d/dx`` and momenta ``m dx (x) dx`` are both stored as
:class:`~geoflow.spectral.GridField`.  Quadratic terms are formed from
two-thirds-dealiased factors and the product is dealiased again, which makes
the products exact (alias free) on the retained band.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    GridField,
    PeriodicGrid,
    check_same_grid,
    dealias_array,
    diff_array,
    integrate,
    trig_interpolate,
)

__all__ = [
    "VirasoroVector",
    "VirasoroMomentum",
    "CircleDiffeo",
    "ad",
    "ad_star",
    "pairing",
    "gelfand_fuchs",
    "vir_bracket",
    "vir_ad_star",
    "vir_pairing",
    "schwarzian",
    "schwarzian_values",
    "bott_thurston",
    "adjoint_group_action",
    "coadjoint_group_action",
]


@dataclass(frozen=True)
class VirasoroVector:
    u: GridField
    a: float = 0.0


@dataclass(frozen=True)
class VirasoroMomentum:
    m: GridField
    eps: float = 0.0


# -- algebra level -----------------------------------------------------------

def ad_array(u, v, grid, dealias=True):
    if dealias:
        u = dealias_array(u, grid)
        v = dealias_array(v, grid)
    out = u * diff_array(v, grid) - v * diff_array(u, grid)
    return dealias_array(out, grid) if dealias else out


def ad_star_array(u, m, grid, dealias=True):
    if dealias:
        u = dealias_array(u, grid)
        m = dealias_array(m, grid)
    out = u * diff_array(m, grid) + 2.0 * diff_array(u, grid) * m
    return dealias_array(out, grid) if dealias else out


def ad(u: GridField, v: GridField, dealias: bool = True) -> GridField:
    """Lie bracket of vector fields, ``u v_x - v u_x``."""
    grid = check_same_grid(u, v)
    return GridField(grid, ad_array(u.values, v.values, grid, dealias))


def ad_star(u: GridField, m: GridField, dealias: bool = True) -> GridField:
    """Coadjoint operator ``(m u)_x + m u_x = u m_x + 2 u_x m``."""
    grid = check_same_grid(u, m)
    return GridField(grid, ad_star_array(u.values, m.values, grid, dealias))


def pairing(m: GridField, u: GridField) -> float:
    check_same_grid(m, u)
    return integrate(m * u)


def gelfand_fuchs(u: GridField, v: GridField) -> float:
    """The cocycle ``int u_x v_xx dx``."""
    grid = check_same_grid(u, v)
    ux = diff_array(u.values, grid, 1)
    vxx = diff_array(v.values, grid, 2)
    return float(np.sum(ux * vxx) * grid.spacing)


def vir_bracket(lhs: VirasoroVector, rhs: VirasoroVector) -> VirasoroVector:
    # central components commute with everything and drop out
    return VirasoroVector(ad(lhs.u, rhs.u), gelfand_fuchs(lhs.u, rhs.u))


def vir_ad_star(arg: VirasoroVector, mom: VirasoroMomentum) -> VirasoroMomentum:
    grid = check_same_grid(arg.u, mom.m)
    vals = ad_star_array(arg.u.values, mom.m.values, grid)
    vals = vals + mom.eps * diff_array(arg.u.values, grid, 3)
    return VirasoroMomentum(GridField(grid, vals), 0.0)


def vir_pairing(mom: VirasoroMomentum, vec: VirasoroVector) -> float:
    return pairing(mom.m, vec.u) + mom.eps * vec.a


# -- group level -------------------------------------------------------------

class CircleDiffeo:
    """Orientation-preserving circle diffeomorphism given by samples of a lift.

    ``lift_values[j]`` is ``phi(x_j)`` for a lift with
    ``phi(x + L) = phi(x) + L``.  The periodic part ``phi(x) - x`` carries the
    band-limited interpolant used for evaluation off the grid.
    """

    def __init__(self, grid: PeriodicGrid, lift_values, _periodic=None):
        lift = np.array(lift_values, dtype=float)
        if lift.shape != (grid.n,):
            raise ValueError(f"lift has shape {lift.shape}, expected ({grid.n},)")
        if not np.all(np.isfinite(lift)):
            raise ValueError("lift values must be finite")
        gaps = np.diff(np.append(lift, lift[0] + grid.length))
        if np.any(gaps <= 0):
            bad = int(np.flatnonzero(gaps <= 0)[0])
            raise ValueError(
                f"lift is not strictly increasing at grid index {bad}; "
                "the map is not an orientation-preserving diffeomorphism")
        lift.setflags(write=False)
        self.grid = grid
        self.lift_values = lift
        self._periodic = GridField(grid, lift - grid.points if _periodic is None else _periodic)

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, func(grid.points))

    @classmethod
    def from_periodic(cls, grid, periodic_values):
        """Build ``phi(x) = x + p(x)`` from samples of ``p`` (kept exactly)."""
        p = np.array(periodic_values, dtype=float)
        return cls(grid, grid.points + p, _periodic=p)

    @classmethod
    def identity(cls, grid):
        return cls.from_periodic(grid, np.zeros(grid.n))

    @classmethod
    def rotation(cls, grid, c):
        return cls.from_periodic(grid, np.full(grid.n, float(c)))

    @property
    def periodic_part(self) -> GridField:
        return self._periodic

    def derivative(self, order: int = 1) -> GridField:
        """``d^k phi/dx^k`` sampled on the grid."""
        d = diff_array(self._periodic.values, self.grid, order)
        if order == 1:
            d = d + 1.0
        return GridField(self.grid, d)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return y + trig_interpolate(self._periodic, y)

    def compose(self, other: "CircleDiffeo") -> "CircleDiffeo":
        """``self o other``."""
        check_same_grid(self, other)
        return CircleDiffeo(self.grid, self(other.lift_values))

    def inverse_values(self, targets, tol: float = 1e-12) -> np.ndarray:
        """Solve ``phi(y) = target`` by bisection followed by Newton."""
        targets = np.asarray(targets, dtype=float)
        # phi(y) - y = p(y); widen until the bracket is valid everywhere
        width = np.max(np.abs(self._periodic.values)) + self.grid.spacing
        while True:
            lo = targets - width
            hi = targets + width
            if np.all(self(lo) <= targets) and np.all(self(hi) >= targets):
                break
            width *= 2
        for _ in range(12):
            mid = 0.5 * (lo + hi)
            above = self(mid) > targets
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
        y = 0.5 * (lo + hi)
        d1 = self.derivative(1)
        for _ in range(50):
            step = (self(y) - targets) / trig_interpolate(d1, y)
            y = y - step
            if np.max(np.abs(step)) < tol:
                break
        return y

    def inverse(self) -> "CircleDiffeo":
        return CircleDiffeo(self.grid, self.inverse_values(self.grid.points))

    def __repr__(self):
        return f"CircleDiffeo(n={self.grid.n}, length={self.grid.length})"


def schwarzian_values(d1, d2, d3):
    """Pointwise ``d3/d1 - 3/2 (d2/d1)^2`` from the first three derivatives."""
    d1 = np.asarray(d1, dtype=float)
    return np.asarray(d3) / d1 - 1.5 * (np.asarray(d2) / d1) ** 2


def schwarzian(phi: CircleDiffeo, min_slope: float = 1e-8) -> GridField:
    d1 = phi.derivative(1).values
    small = np.flatnonzero(d1 <= min_slope)
    if small.size:
        j = int(small[0])
        raise ValueError(
            f"phi_x = {d1[j]:.3e} is not bounded away from zero at grid index {j}")
    d2 = phi.derivative(2).values
    d3 = phi.derivative(3).values
    return GridField(phi.grid, schwarzian_values(d1, d2, d3))


def bott_thurston(phi: CircleDiffeo, psi: CircleDiffeo) -> float:
    """``1/2 int log(phi_x o psi) d log psi_x``."""
    grid = check_same_grid(phi, psi)
    phi_x_at_psi = trig_interpolate(phi.derivative(1), psi.lift_values)
    if np.any(phi_x_at_psi <= 0):
        raise ValueError("phi_x o psi is not positive; phi is not monotone")
    psi_x = psi.derivative(1).values
    psi_xx = psi.derivative(2).values
    integrand = np.log(phi_x_at_psi) * psi_xx / psi_x
    return 0.5 * float(np.sum(integrand) * grid.spacing)


def adjoint_group_action(phi: CircleDiffeo, u: GridField) -> GridField:
    """Push-forward ``(phi_* u)(x) = phi_x(phi^-1 x) u(phi^-1 x)``."""
    grid = check_same_grid(phi, u)
    y = phi.inverse_values(grid.points)
    vals = trig_interpolate(phi.derivative(1), y) * trig_interpolate(u, y)
    return GridField(grid, vals)


def coadjoint_group_action(phi: CircleDiffeo, mom: VirasoroMomentum) -> VirasoroMomentum:
    """Pull-back of a momentum with the Schwarzian central term.

    Returns ``(m(phi) phi_x^2 + eps S(phi), eps)``; with ``eps = 0`` this is
    the coadjoint action ``Ad*_{phi^-1}`` of Diff+(S^1).
    """
    grid = check_same_grid(phi, mom.m)
    d1 = phi.derivative(1).values
    vals = trig_interpolate(mom.m, phi.lift_values) * d1 ** 2
    if mom.eps:
        vals = vals + mom.eps * schwarzian(phi).values
    return VirasoroMomentum(GridField(grid, vals), mom.eps)
