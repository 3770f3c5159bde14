"""One-parameter symmetry groups acting on numerical solutions.

Every grid-compatible group used here maps a solution ``f`` to

    u(t, x) = a * f(tau(t), x - delta(t)) + b

with ``tau``, ``delta``, ``a`` and ``b`` depending on the group parameter
``s``.  Spatial shifts use Fourier interpolation; time lookups use the stored
snapshots, or a short re-simulation from the nearest one when solver options
are supplied.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .geodesic import (EquationConfig, SolverOptions, Trajectory, evolve,
                       invariants, residual, simulate)
from .jet import catalog
from .jet.calculus import PointVectorField
from .spectral import GridField, shift

__all__ = [
    "SolutionRule",
    "SymmetrySpec",
    "GridIncompatible",
    "list_symmetries",
    "find_symmetry",
    "printed_variant",
    "transform_solution",
    "symmetry_consistency_test",
    "ConsistencyReport",
]


class GridIncompatible(ValueError):
    """The group rescales x, so it does not act on a fixed periodic grid."""


@dataclass(frozen=True)
class SolutionRule:
    tau: float
    delta: float
    a: float
    b: float


# --- closed-form groups ----------------------------------------------------
# each family returns (point_map, rule); point_map(s, t, x, u) -> (t, x, u)

def _scaling_family(c, k):
    # flow of -t d_t + k t d_x + (u + c) d_u
    def point(s, t, x, u):
        return (t * math.exp(-s), x + k * t * (1 - math.exp(-s)),
                (u + c) * math.exp(s) - c)

    def rule(s, t):
        es = math.exp(s)
        return SolutionRule(t * es, k * t * (es - 1), es, c * (es - 1))
    return point, rule


def _time_translation():
    return (lambda s, t, x, u: (t + s, x, u),
            lambda s, t: SolutionRule(t - s, 0.0, 1.0, 0.0))


def _space_translation():
    return (lambda s, t, x, u: (t, x + s, u),
            lambda s, t: SolutionRule(t, s, 1.0, 0.0))


def _galilean(speed):
    # flow of speed*t d_x + d_u
    return (lambda s, t, x, u: (t, x + speed * s * t, u + s),
            lambda s, t: SolutionRule(t, speed * s * t, 1.0, s))


def _xt_scaling(pt, px, pu):
    # flow of pt t d_t + px x d_x + pu u d_u; rescales the circle
    def point(s, t, x, u):
        return (t * math.exp(pt * s), x * math.exp(px * s), u * math.exp(pu * s))
    return point, None


@dataclass(frozen=True)
class SymmetrySpec:
    equation: EquationConfig
    generator_id: str
    kind: str
    generator: PointVectorField
    point_map: Callable
    rule: Callable | None

    @property
    def grid_compatible(self) -> bool:
        return self.rule is not None

    def solution_rule(self, s: float, t: float) -> SolutionRule:
        if self.rule is None:
            raise GridIncompatible(
                f"{self.generator_id} rescales x and cannot act on a fixed periodic grid; "
                "it is verified symbolically via invariance-check")
        return self.rule(s, t)

    def generator_at(self, t: float, x: float, u: float):
        """Numeric components ``(T, X, U)`` of the generator."""
        vals = {"t": t, "x": x, "u": u, "eps": self.equation.eps}
        return tuple(float(c.evaluate(vals)) for c in self.generator.components)

    def __repr__(self):
        return f"SymmetrySpec({self.generator_id}: {self.generator})"


def _groups(name, eps):
    scaling = {
        "ch": (0.0, 0.0),
        "hs": (0.0, 0.0),
        "dch": (eps / 2, 3 * eps / 2),
        "dhs": (-eps, 0.0),
    }
    table = {
        "ch": {"v1": _scaling_family(*scaling["ch"]), "v2": _time_translation(),
               "v3": _space_translation()},
        "hs": {"v1": _scaling_family(*scaling["hs"]), "v2": _time_translation(),
               "v3": _xt_scaling(1, 1, 0), "v4": _space_translation()},
        "kdv": {"v1": _space_translation(), "v2": _time_translation(),
                "v3": _galilean(3.0), "v4": _xt_scaling(3, 1, -2)},
        "dch": {"v1": _scaling_family(*scaling["dch"]), "v2": _time_translation(),
                "v3": _space_translation()},
        "dhs": {"v1": _scaling_family(*scaling["dhs"]), "v2": _time_translation(),
                "v3": _xt_scaling(1, 1, 0), "v4": _space_translation()},
    }
    return table[name]


def _check_symmetric(config):
    name = config.name
    if name is None:
        raise ValueError("no symmetry table for a custom metric")
    if name == "hopf":
        raise ValueError(
            "the Hopf equation is excluded from the symmetry analysis; "
            "its symmetry generators involve implicit functions of the solution")
    return name


def list_symmetries(config: EquationConfig) -> list:
    name = _check_symmetric(config)
    groups = _groups(name, config.eps)
    specs = []
    for gen in catalog.generators(name):
        gid = gen.id.split(".")[1]
        point, rule = groups[gid]
        specs.append(SymmetrySpec(config, gen.id, gen.kind, gen.field, point, rule))
    return specs


def find_symmetry(config: EquationConfig, generator_id: str) -> SymmetrySpec:
    """Look up ``v3`` or ``kdv.v3`` in the table of ``config``."""
    specs = list_symmetries(config)
    for spec in specs:
        if generator_id in (spec.generator_id, spec.generator_id.split(".")[1]):
            return spec
    ids = ", ".join(s.generator_id for s in specs)
    raise KeyError(f"no generator {generator_id!r}; available: {ids}")


def printed_variant(config: EquationConfig, generator_id: str) -> SymmetrySpec:
    """The commonly printed form of a generator that is not a symmetry.

    Used to demonstrate that the harness detects a wrong group.
    """
    name = _check_symmetric(config)
    key = f"{name}.{generator_id.split('.')[-1]}"
    base = find_symmetry(config, key)
    generator = catalog.PRINTED_VARIANTS.get(key, base.generator)
    if key == "kdv.v3":
        point, rule = _galilean(1.0)
    elif key == "dhs.v1":
        point, rule = _scaling_family(1.0, 0.0)
    elif key == "dch.v1":
        # correct group, but the solution rule without the offset in u
        point = base.point_map

        def rule(s, t, _full=base.rule):
            return replace(_full(s, t), b=0.0)
    else:
        raise KeyError(f"no printed variant recorded for {key}")
    return replace(base, generator_id=key + ".printed", generator=generator,
                   point_map=point, rule=rule)


# --- acting on trajectories --------------------------------------------------

class _Source:
    """Stored snapshots of a trajectory, extended on demand.

    With solver options the stored range grows in steps of ``dt`` so that
    many lookups outside it cost one integration, not one each.
    """

    def __init__(self, traj, resimulate, time_tol):
        self.config = traj.config
        self.times = list(map(float, traj.times))
        self.snaps = list(traj.snapshots)
        self.opts = resimulate
        self.tol = time_tol

    def _extend(self, tau):
        dt = self.opts.dt
        while tau < self.times[0] - dt:
            self.snaps.insert(0, evolve(self.config, self.snaps[0], -dt, self.opts))
            self.times.insert(0, self.times[0] - dt)
        while tau > self.times[-1] + dt:
            self.snaps.append(evolve(self.config, self.snaps[-1], dt, self.opts))
            self.times.append(self.times[-1] + dt)

    def at(self, tau):
        lo, hi = self.times[0], self.times[-1]
        if self.opts is None:
            if tau < lo - self.tol or tau > hi + self.tol:
                raise ValueError(
                    f"time {tau:.6g} lies outside the trajectory range [{lo:.6g}, {hi:.6g}]")
        else:
            self._extend(tau)
        times = np.asarray(self.times)
        k = int(np.argmin(np.abs(times - tau)))
        if abs(times[k] - tau) <= self.tol or self.opts is None:
            return self.snaps[k]
        return evolve(self.config, self.snaps[k], tau - times[k], self.opts)


def transform_solution(spec: SymmetrySpec, s: float, traj: Trajectory,
                       times=None, resimulate: SolverOptions | None = None,
                       time_tol: float = 1e-9) -> Trajectory:
    """Image of ``traj`` under the group element ``exp(s v)``.

    ``times`` defaults to the stored times of ``traj``.  Source times that
    are not stored are taken from the nearest snapshot, or, when
    ``resimulate`` is given, by integrating from it for the short remainder
    (either direction).  Without ``resimulate`` a source time outside the
    stored range is an error.
    """
    if not spec.grid_compatible:
        spec.solution_rule(s, 0.0)  # raises
    times = traj.times if times is None else np.asarray(times, dtype=float)
    return _apply(spec, s, _Source(traj, resimulate, time_tol), times)


def _apply(spec, s, source, times):
    snaps = []
    for t in times:
        r = spec.solution_rule(s, float(t))
        f = source.at(r.tau)
        g = shift(f, r.delta) if r.delta else f
        snaps.append(GridField(f.grid, r.a * g.values + r.b))
    log = [invariants(source.config, u) for u in snaps]
    return Trajectory(source.config, times, snaps, log)


@dataclass
class ConsistencyReport:
    spec: SymmetrySpec
    s: float
    original: Trajectory
    resimulated: Trajectory
    transformed: Trajectory | None
    discrepancy: float
    discrepancy_series: np.ndarray = field(repr=False)
    residual_times: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    reference_residuals: list = field(default_factory=list)
    blew_up: bool = False

    def as_dict(self) -> dict:
        return {
            "equation": self.spec.equation.name,
            "eps": self.spec.equation.eps,
            "generator": self.spec.generator_id,
            "kind": self.spec.kind,
            "field": str(self.spec.generator),
            "s": self.s,
            "discrepancy": self.discrepancy,
            "residual_times": list(map(float, self.residual_times)),
            "residuals": list(map(float, self.residuals)),
            "reference_residuals": list(map(float, self.reference_residuals)),
            "blew_up": self.blew_up,
        }


def _horizon(spec, s, t_end):
    taus = [spec.solution_rule(s, t).tau for t in (0.0, t_end)]
    return max(max(taus), 0.0)


def symmetry_consistency_test(spec: SymmetrySpec, s: float, u0: GridField,
                              t_end: float, opts: SolverOptions | None = None,
                              residual_fractions=(0.25, 0.5, 0.75)) -> ConsistencyReport:
    """Compare the flow from the transformed data with the transformed flow.

    A is the solution from ``u0``; B is the solution from the image of the
    initial data.  Both are stored at every step, and the transform of A is
    evaluated at the times of B.  Reference residuals are those of the
    untransformed solution at the matching preimage times.
    """
    opts = replace(opts or SolverOptions(), store_every=1)
    config = spec.equation
    if not spec.grid_compatible:
        spec.solution_rule(s, 0.0)
    horizon = _horizon(spec, s, t_end)

    seed = Trajectory(config, [0.0], [u0])
    b0 = transform_solution(spec, s, seed, times=[0.0], resimulate=opts).snapshots[0]

    def run(u, t):
        if t <= 0:
            return Trajectory(config, [0.0], [u])
        return simulate(config, u, t, opts)

    with ThreadPoolExecutor(max_workers=2) as pool:
        fut_a = pool.submit(run, u0, horizon)
        fut_b = pool.submit(run, b0, t_end)
        traj_a, traj_b = fut_a.result(), fut_b.result()

    if traj_a.blew_up or traj_b.blew_up:
        return ConsistencyReport(spec, s, traj_a, traj_b, None, math.inf,
                                 np.array([]), blew_up=True)

    source = _Source(traj_a, opts, 1e-9)
    image = _apply(spec, s, source, traj_b.times)
    series = np.array([np.max(np.abs(p.values - q.values))
                       for p, q in zip(traj_b.snapshots, image.snapshots)])

    n_times = len(traj_b.times)
    idx = sorted({min(max(int(round(f * (n_times - 1))), 1), n_times - 2)
                  for f in residual_fractions})
    res, ref = [], []
    for i in idx:
        res.append(residual(config, image, i))
        # untransformed solution around the preimage time; the flow is autonomous
        tau = spec.solution_rule(s, traj_b.times[i]).tau
        h = opts.dt
        stencil = Trajectory(config, [0.0, h, 2 * h],
                             [source.at(tau - h), source.at(tau), source.at(tau + h)])
        ref.append(residual(config, stencil, 1))
    return ConsistencyReport(spec, s, traj_a, traj_b, image, float(series.max()), series,
                             [float(traj_b.times[i]) for i in idx], res, ref)
