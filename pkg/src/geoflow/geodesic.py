"""Euler-Poincare geodesic flows on Diff+(S^1) and the Virasoro-Bott group.

All six equations are integrated in momentum form::

    m = A u,    m_t = -(u m_x + 2 u_x m) - eps u_xxx,    u_t = A^{-1} m_t

with ``A = alpha^2 - beta^2 d_xx`` and the ``eps`` term present only for the
Virasoro group.  The state carried between steps is the velocity ``u``; for
the degenerate metric the increment ``u_t`` is taken with zero mean so the
mean of ``u`` is a constant of the motion.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .inertia import H1, H1_DOT, L2, MetricParams, inertia_symbol, lagrangian
from .lie import ad_star_array
from .spectral import GridField, derivative_symbol, diff_array, integrate

__all__ = [
    "Group",
    "EquationConfig",
    "SolverOptions",
    "Trajectory",
    "EQUATIONS",
    "rhs",
    "simulate",
    "evolve",
    "invariants",
    "hopf_blowup_estimate",
    "residual",
]


class Group(str, enum.Enum):
    DIFF = "diff"
    VIRASORO = "virasoro"


EQUATIONS = {
    "hopf": (Group.DIFF, L2),
    "ch": (Group.DIFF, H1),
    "hs": (Group.DIFF, H1_DOT),
    "kdv": (Group.VIRASORO, L2),
    "dch": (Group.VIRASORO, H1),
    "dhs": (Group.VIRASORO, H1_DOT),
}

LONG_NAMES = {
    "hopf": "Hopf",
    "ch": "Camassa-Holm",
    "hs": "Hunter-Saxton",
    "kdv": "Korteweg-de Vries",
    "dch": "dispersive Camassa-Holm",
    "dhs": "dispersive Hunter-Saxton",
}


@dataclass(frozen=True)
class EquationConfig:
    group: Group
    metric: MetricParams
    eps: float = 1.0

    @classmethod
    def named(cls, name: str, eps: float = 1.0) -> "EquationConfig":
        try:
            group, metric = EQUATIONS[name]
        except KeyError:
            raise ValueError(
                f"unknown equation {name!r}; choose from {sorted(EQUATIONS)}") from None
        return cls(group, metric, eps)

    @property
    def name(self) -> str | None:
        for key, (group, metric) in EQUATIONS.items():
            if group == self.group and metric == self.metric:
                return key
        return None

    @property
    def central(self) -> float:
        """Coefficient of ``u_xxx`` in the momentum equation."""
        return self.eps if self.group == Group.VIRASORO else 0.0

    @property
    def is_hopf(self) -> bool:
        return self.group == Group.DIFF and self.metric == L2


@dataclass(frozen=True)
class SolverOptions:
    dt: float = 1e-3
    scheme: str = "auto"
    dealias: bool = True
    store_every: int = 1
    hopf_safety: float | None = 0.9

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.scheme not in ("rk4", "ifrk4", "auto"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.store_every < 1:
            raise ValueError("store_every must be a positive integer")


@dataclass
class Trajectory:
    config: EquationConfig
    times: np.ndarray
    snapshots: list
    invariant_log: list = field(default_factory=list)
    blew_up: bool = False
    failure_time: float | None = None
    truncated: bool = False

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.snapshots):
            raise ValueError("times and snapshots differ in length")
        if len(self.times) and self.times[0] != 0.0:
            raise ValueError("trajectories start at t = 0")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def grid(self):
        return self.snapshots[0].grid

    @property
    def final(self) -> GridField:
        return self.snapshots[-1]

    def series(self, key: str) -> np.ndarray:
        return np.array([rec[key] for rec in self.invariant_log])


class _Stepper:
    """Pre-computed Fourier symbols for one equation on one grid."""

    def __init__(self, config, grid, dealias=True):
        self.config = config
        self.grid = grid
        self.dealias = dealias
        sym = inertia_symbol(config.metric, grid)
        self.degenerate = config.metric.degenerate
        if self.degenerate:
            sym = sym.copy()
            sym[0] = 1.0
        self.inv_symbol = 1.0 / sym
        if self.degenerate:
            self.inv_symbol[0] = 0.0
        self.d2 = derivative_symbol(grid, 2)
        # linear part of u_t = ... - eps A^{-1} u_xxx
        self.linear = -config.central * derivative_symbol(grid, 3) * self.inv_symbol

    def momentum(self, u):
        a, b = self.config.metric.alpha, self.config.metric.beta
        U = np.fft.rfft(u)
        return np.fft.irfft((a * a - b * b * self.d2) * U, n=self.grid.n)

    def nonlinear_hat(self, U):
        """Fourier coefficients of ``-A^{-1} ad*_u (A u)``."""
        u = np.fft.irfft(U, n=self.grid.n)
        m = self.momentum(u)
        adm = ad_star_array(u, m, self.grid, self.dealias)
        return -np.fft.rfft(adm) * self.inv_symbol

    def full_hat(self, U):
        return self.nonlinear_hat(U) + self.linear * U

    def rk4(self, U, h):
        f = self.full_hat
        k1 = f(U)
        k2 = f(U + 0.5 * h * k1)
        k3 = f(U + 0.5 * h * k2)
        k4 = f(U + h * k3)
        return U + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    def ifrk4(self, U, h):
        # Lawson integrating-factor RK4; the linear part is integrated exactly
        N = self.nonlinear_hat
        E = np.exp(self.linear * h)
        E2 = np.exp(self.linear * h / 2)
        k1 = N(U)
        k2 = N(E2 * (U + 0.5 * h * k1))
        k3 = N(E2 * U + 0.5 * h * k2)
        k4 = N(E * U + h * E2 * k3)
        return E * U + h / 6.0 * (E * k1 + 2 * E2 * (k2 + k3) + k4)

    def step_fn(self, scheme):
        if scheme == "auto":
            scheme = "ifrk4" if self.config.central else "rk4"
        return self.rk4 if scheme == "rk4" else self.ifrk4


def rhs(config: EquationConfig, u: GridField, dealias: bool = True) -> GridField:
    """Time derivative ``u_t`` of the geodesic equation at the state ``u``."""
    st = _Stepper(config, u.grid, dealias)
    return GridField(u.grid, np.fft.irfft(st.full_hat(np.fft.rfft(u.values)), n=u.grid.n))


def invariants(config: EquationConfig, u: GridField) -> dict:
    m = GridField(u.grid, _Stepper(config, u.grid).momentum(u.values))
    return {
        "energy": lagrangian(config.metric, u),
        "momentum_mean": integrate(m),
        "mass": integrate(u),
        "l2": integrate(u * u),
    }


def hopf_blowup_estimate(u0: GridField) -> float:
    """Shock time ``1 / (3 max(-u0_x))`` of ``u_t + 3 u u_x = 0``."""
    steepest = float(np.max(-diff_array(u0.values, u0.grid, 1)))
    if steepest <= 0:
        return math.inf
    return 1.0 / (3.0 * steepest)


_BLOWUP_BOUND = 1e100


def _step_count(duration, dt):
    return max(1, int(math.ceil(abs(duration) / dt - 1e-9)))


def evolve(config: EquationConfig, u: GridField, duration: float,
           opts: SolverOptions) -> GridField:
    """Advance ``u`` by a signed ``duration`` using equal substeps no longer than ``dt``."""
    if duration == 0:
        return u
    st = _Stepper(config, u.grid, opts.dealias)
    step = st.step_fn(opts.scheme)
    nsteps = _step_count(duration, opts.dt)
    h = duration / nsteps
    U = np.fft.rfft(u.values)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(nsteps):
            U = step(U, h)
    vals = np.fft.irfft(U, n=u.grid.n)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError(f"non-finite state while evolving by {duration}")
    return GridField(u.grid, vals)


def simulate(config: EquationConfig, u0: GridField, t_end: float,
             opts: SolverOptions | None = None) -> Trajectory:
    opts = opts or SolverOptions()
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    truncated = False
    if config.is_hopf and opts.hopf_safety is not None:
        t_star = hopf_blowup_estimate(u0)
        limit = opts.hopf_safety * t_star
        if t_end > limit:
            warnings.warn(
                f"Hopf solution forms a shock at t* = {t_star:.6g}; "
                f"stopping at {limit:.6g}", RuntimeWarning, stacklevel=2)
            t_end = limit
            truncated = True

    grid = u0.grid
    st = _Stepper(config, grid, opts.dealias)
    step = st.step_fn(opts.scheme)
    dt = opts.dt
    nsteps = _step_count(t_end, dt)
    times = [0.0]
    snaps = [u0]
    log = [invariants(config, u0)]
    U = np.fft.rfft(u0.values)
    for i in range(1, nsteps + 1):
        t_now = min(i * dt, t_end)
        h = t_now - min((i - 1) * dt, t_end)
        with np.errstate(over="ignore", invalid="ignore"):
            U = step(U, h)
        # finite but astronomically large states overflow the invariants
        if not np.all(np.isfinite(U)) or np.max(np.abs(U)) > _BLOWUP_BOUND:
            return Trajectory(config, times, snaps, log, blew_up=True,
                              failure_time=t_now, truncated=truncated)
        if i % opts.store_every == 0 or i == nsteps:
            u = GridField(grid, np.fft.irfft(U, n=grid.n))
            times.append(t_now)
            snaps.append(u)
            log.append(invariants(config, u))
    return Trajectory(config, times, snaps, log, truncated=truncated)


def equation_terms(config: EquationConfig, u: np.ndarray, u_t: np.ndarray,
                   u_txx: np.ndarray, grid) -> np.ndarray:
    """Evaluate the expanded geodesic equation from its ingredients."""
    a2 = config.metric.alpha ** 2
    b2 = config.metric.beta ** 2
    ux = diff_array(u, grid, 1)
    uxx = diff_array(u, grid, 2)
    uxxx = diff_array(u, grid, 3)
    out = a2 * u_t - b2 * u_txx + 3 * a2 * u * ux - 2 * b2 * ux * uxx - b2 * u * uxxx
    return out + config.central * uxxx


def residual(config: EquationConfig, traj: Trajectory, index: int) -> float:
    """Max-norm of the equation with centred differences in time at ``index``."""
    n_times = len(traj.times)
    if not 1 <= index <= n_times - 2:
        raise IndexError(f"index {index} is not an interior time index of 0..{n_times - 1}")
    t = traj.times
    dt_back = t[index] - t[index - 1]
    dt_fwd = t[index + 1] - t[index]
    if abs(dt_fwd - dt_back) > 1e-9 * max(dt_fwd, dt_back):
        raise ValueError(f"time spacing is not uniform around index {index}")
    grid = traj.grid
    prev, cur, nxt = (traj.snapshots[j].values for j in (index - 1, index, index + 1))
    u_t = (nxt - prev) / (2 * dt_fwd)
    u_txx = diff_array(u_t, grid, 2)
    return float(np.max(np.abs(equation_terms(config, cur, u_t, u_txx, grid))))


def with_store_every(opts: SolverOptions, k: int) -> SolverOptions:
    return replace(opts, store_every=k)
