import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from geoflow.geodesic import EquationConfig, SolverOptions, Trajectory, simulate
from geoflow.spectral import GridField, make_grid
from geoflow.symmetry import (GridIncompatible, SolutionRule, find_symmetry, list_symmetries,
                              printed_variant, symmetry_consistency_test, transform_solution)

NAMES = ("ch", "hs", "kdv", "dch", "dhs")
EPS = 0.7


def _specs(eps=EPS, compatible=None):
    out = []
    for name in NAMES:
        for spec in list_symmetries(EquationConfig.named(name, eps)):
            if compatible is None or spec.grid_compatible == compatible:
                out.append(spec)
    return out


def _ids(spec):
    return spec.generator_id


# --- tables ------------------------------------------------------------------

def test_counts_and_kinds():
    counts = {n: len(list_symmetries(EquationConfig.named(n))) for n in NAMES}
    assert counts == {"ch": 3, "hs": 4, "kdv": 4, "dch": 3, "dhs": 4}
    kinds = {s.kind for s in _specs()}
    assert kinds == {"scaling", "time translation", "space translation", "Galilean boost",
                     "generalised Galilean boost"}


def test_hopf_excluded():
    with pytest.raises(ValueError, match="excluded"):
        list_symmetries(EquationConfig.named("hopf"))


def test_grid_compatibility_flags():
    incompatible = {s.generator_id for s in _specs(compatible=False)}
    assert incompatible == {"kdv.v4", "hs.v3", "dhs.v3"}
    spec = find_symmetry(EquationConfig.named("kdv"), "v4")
    with pytest.raises(GridIncompatible, match="invariance-check"):
        spec.solution_rule(0.1, 0.0)
    g = make_grid(16)
    traj = Trajectory(spec.equation, [0.0], [g.zeros()])
    with pytest.raises(GridIncompatible):
        transform_solution(spec, 0.1, traj)


def test_find_symmetry():
    cfg = EquationConfig.named("kdv")
    assert find_symmetry(cfg, "v3").generator_id == "kdv.v3"
    assert find_symmetry(cfg, "kdv.v3").kind == "Galilean boost"
    with pytest.raises(KeyError, match="available"):
        find_symmetry(cfg, "v9")


# --- closed forms ------------------------------------------------------------

@pytest.mark.parametrize("spec", _specs(), ids=_ids)
def test_point_map_derivative_is_generator(spec):
    h = 1e-6
    for t, x, u in [(0.3, 1.1, -0.4), (1.2, -0.5, 0.8)]:
        p = np.array(spec.point_map(h, t, x, u))
        m = np.array(spec.point_map(-h, t, x, u))
        np.testing.assert_allclose((p - m) / (2 * h), spec.generator_at(t, x, u), atol=1e-8)


@pytest.mark.parametrize("spec", _specs(), ids=_ids)
def test_point_map_is_generator_flow(spec):
    s = 0.45
    start = (0.3, 1.1, -0.4)
    sol = solve_ivp(lambda _, y: spec.generator_at(*y), (0, s), start, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(sol.y[:, -1], spec.point_map(s, *start), atol=1e-9)


@pytest.mark.parametrize("spec", _specs(compatible=True), ids=_ids)
def test_rule_is_image_of_graph(spec):
    # the solution rule evaluates the image of the graph of f under the point map
    f = lambda t, x: np.sin(x + 0.4 * t) + 0.2 * t
    for s in (-0.3, 0.5):
        for t0, x0 in [(0.2, 0.3), (1.0, 2.0)]:
            t1, x1, u1 = spec.point_map(s, t0, x0, f(t0, x0))
            r = spec.solution_rule(s, t1)
            assert r.a * f(r.tau, x1 - r.delta) + r.b == pytest.approx(u1, abs=1e-13)


@pytest.mark.parametrize("spec", _specs(compatible=True), ids=_ids)
@settings(max_examples=25)
@given(s1=st.floats(-1, 1), s2=st.floats(-1, 1), t=st.floats(0, 2))
def test_rule_group_law(spec, s1, s2, t):
    r1 = spec.solution_rule(s1, t)
    r2 = spec.solution_rule(s2, r1.tau)
    both = spec.solution_rule(s1 + s2, t)
    composed = SolutionRule(r2.tau, r1.delta + r2.delta, r1.a * r2.a, r1.a * r2.b + r1.b)
    for name in ("tau", "delta", "a", "b"):
        assert getattr(composed, name) == pytest.approx(getattr(both, name), abs=1e-12)


# --- finite transforms map solutions to solutions (sympy oracle) -----------------

def _pde(name, U, eps):
    ch = U[1, 0] - U[1, 2] + 3 * U[0, 0] * U[0, 1] - 2 * U[0, 1] * U[0, 2] - U[0, 0] * U[0, 3]
    hs = U[1, 2] + 2 * U[0, 1] * U[0, 2] + U[0, 0] * U[0, 3]
    return {"ch": (ch, (1, 2)), "hs": (hs, (1, 2)), "dch": (ch + eps * U[0, 3], (1, 2)),
            "dhs": (hs - eps * U[0, 3], (1, 2)),
            "kdv": (U[1, 0] + 3 * U[0, 0] * U[0, 1] + eps * U[0, 3], (1, 0))}[name]


def _image_jets(alpha, beta, gamma, a, b):
    """Jets of a*F(tau, xi) + b when d_t = alpha D_tau + beta D_xi and d_x = gamma D_xi."""
    F = {(i, j): sp.Symbol(f"F_{i}_{j}") for i in range(3) for j in range(6)}

    def D(expr, di, dj):
        return sum(sp.diff(expr, F[k]) * F[k[0] + di, k[1] + dj] for k in F
                   if expr.has(F[k]) and (k[0] + di, k[1] + dj) in F)

    U = {}
    for i in range(2):
        for j in range(4):
            e = a * F[0, 0] + (b if i == j == 0 else 0)
            if (i, j) != (0, 0):
                e = a * F[0, 0]
            for _ in range(j):
                e = gamma * D(e, 0, 1)
            for _ in range(i):
                e = alpha * D(e, 1, 0) + beta * D(e, 0, 1)
            U[i, j] = sp.expand(e)
    U[0, 0] = a * F[0, 0] + b
    return U, F


@pytest.mark.parametrize("spec", _specs(), ids=_ids)
def test_transform_maps_solutions_to_solutions(spec):
    name = spec.equation.name
    s = 0.3
    if spec.grid_compatible:
        r0, r1 = spec.solution_rule(s, 0.0), spec.solution_rule(s, 1.0)
        assert spec.solution_rule(s, 2.0).tau == pytest.approx(2 * r1.tau - r0.tau)
        alpha, beta, gamma = r1.tau - r0.tau, -(r1.delta - r0.delta), 1.0
        a, b = r0.a, r0.b
    else:
        # image of (t, x, u) -> (t e^{pt s}, x e^{px s}, u e^{pu s})
        et, ex, eu = (spec.point_map(s, 1.0, 1.0, 1.0))
        alpha, beta, gamma, a, b = 1 / et, 0.0, 1 / ex, eu, 0.0
    U, F = _image_jets(alpha, beta, gamma, a, b)
    delta_u, lead = _pde(name, U, EPS)
    delta_f, _ = _pde(name, F, EPS)
    solved = sp.solve(delta_f, F[lead])[0]
    rem = sp.expand(delta_u.subs(F[lead], solved))
    coeffs = sp.Poly(rem, *F.values()).coeffs() if rem != 0 else []
    assert max((abs(float(c)) for c in coeffs), default=0.0) < 1e-12


@pytest.mark.parametrize("key,bad", [("kdv.v3", True), ("dhs.v1", True), ("dch.v1", True)])
def test_printed_variant_rules_fail_oracle(key, bad):
    spec = printed_variant(EquationConfig.named(key[:3].rstrip("."), EPS), key)
    s = 0.3
    r0, r1 = spec.solution_rule(s, 0.0), spec.solution_rule(s, 1.0)
    U, F = _image_jets(r1.tau - r0.tau, -(r1.delta - r0.delta), 1.0, r0.a, r0.b)
    name = spec.equation.name
    delta_u, lead = _pde(name, U, EPS)
    delta_f, _ = _pde(name, F, EPS)
    rem = sp.expand(delta_u.subs(F[lead], sp.solve(delta_f, F[lead])[0]))
    assert (rem != 0) == bad


# --- acting on trajectories --------------------------------------------------

@pytest.fixture(scope="module")
def kdv_traj():
    g = make_grid(64)
    u0 = g.evaluate(lambda x: np.sin(x) + 0.3 * np.cos(2 * x))
    return simulate(EquationConfig.named("kdv"), u0, 0.2, SolverOptions(dt=1e-3, store_every=10))


def test_identity_transform(kdv_traj):
    for spec in list_symmetries(kdv_traj.config):
        if not spec.grid_compatible:
            continue
        out = transform_solution(spec, 0.0, kdv_traj)
        for p, q in zip(out.snapshots, kdv_traj.snapshots):
            assert np.max(np.abs(p.values - q.values)) < 1e-12


def test_space_translation_rotates():
    g = make_grid(64)
    cfg = EquationConfig.named("ch")
    traj = Trajectory(cfg, [0.0], [g.evaluate(np.sin)])
    out = transform_solution(find_symmetry(cfg, "v3"), 0.7, traj)
    np.testing.assert_allclose(out.final.values, np.sin(g.points - 0.7), atol=1e-13)


def test_galilean_on_zero_solution():
    g = make_grid(32)
    cfg = EquationConfig.named("kdv")
    traj = simulate(cfg, g.zeros(), 0.3, SolverOptions(dt=0.05))
    out = transform_solution(find_symmetry(cfg, "v3"), 0.5, traj)
    for u in out.snapshots:
        np.testing.assert_allclose(u.values, 0.5, atol=1e-15)


@pytest.mark.parametrize("gid", ["v1", "v3"])
def test_trajectory_group_law(kdv_traj, gid):
    spec = find_symmetry(kdv_traj.config, gid)
    s1, s2 = 0.4, -0.25
    once = transform_solution(spec, s1 + s2, kdv_traj)
    twice = transform_solution(spec, s1, transform_solution(spec, s2, kdv_traj))
    for p, q in zip(once.snapshots, twice.snapshots):
        assert np.max(np.abs(p.values - q.values)) < 1e-10


def test_time_outside_range(kdv_traj):
    spec = find_symmetry(kdv_traj.config, "v2")
    with pytest.raises(ValueError, match="outside"):
        transform_solution(spec, -0.5, kdv_traj)
    # a re-simulation extends the range instead
    opts = SolverOptions(dt=1e-3)
    out = transform_solution(spec, -0.05, kdv_traj, times=[0.0, 0.2], resimulate=opts)
    ref = simulate(kdv_traj.config, kdv_traj.snapshots[0], 0.25, opts).final
    assert np.max(np.abs(out.final.values - ref.values)) < 1e-10


# --- consistency -------------------------------------------------------------

OPTS = SolverOptions(dt=1e-3)


def test_ch_translation_example():
    g = make_grid(256)
    spec = find_symmetry(EquationConfig.named("ch"), "v3")
    rep = symmetry_consistency_test(spec, 1.0, g.evaluate(np.sin), 0.5, OPTS)
    assert rep.discrepancy < 1e-6
    assert len(rep.residuals) == 3


def test_kdv_galilean_example():
    g = make_grid(256)
    spec = find_symmetry(EquationConfig.named("kdv"), "v3")
    u0 = g.evaluate(lambda x: np.sin(x) + 0.3 * np.cos(2 * x))
    rep = symmetry_consistency_test(spec, 0.3, u0, 0.5, OPTS)
    assert rep.discrepancy < 1e-5
    for r, ref in zip(rep.residuals, rep.reference_residuals):
        assert r <= 5 * ref


def test_dhs_scaling_example():
    # dispersion 1: the u-offset of the scaling group is -1, so (u - 1) e^s + 1
    g = make_grid(256)
    cfg = EquationConfig.named("dhs", 1.0)
    spec = find_symmetry(cfg, "v1")
    assert spec.point_map(0.2, 1.0, 0.0, 2.0)[2] == pytest.approx(math.exp(0.2) + 1)
    u0 = g.evaluate(lambda x: np.sin(x) + 0.3 * np.cos(2 * x))
    rep = symmetry_consistency_test(spec, 0.2, u0, 0.5, OPTS)
    assert rep.discrepancy < 1e-5
    assert rep.original.times[-1] == pytest.approx(0.5 * math.exp(0.2))
    for r, ref in zip(rep.residuals, rep.reference_residuals):
        assert r <= 5 * ref


@pytest.mark.parametrize("key", ["kdv.v3", "dhs.v1", "dch.v1"])
def test_printed_variants_detected(key):
    g = make_grid(128)
    spec = printed_variant(EquationConfig.named(key.split(".")[0], 1.0), key)
    u0 = g.evaluate(lambda x: np.sin(x) + 0.3 * np.cos(2 * x))
    rep = symmetry_consistency_test(spec, 0.3, u0, 0.5, OPTS)
    assert rep.discrepancy > 1e-2


def test_printed_variant_unknown():
    with pytest.raises(KeyError):
        printed_variant(EquationConfig.named("ch"), "v3")


def test_discrepancy_converges_at_fourth_order():
    g = make_grid(128)
    spec = find_symmetry(EquationConfig.named("ch"), "v1")
    u0 = g.evaluate(lambda x: np.sin(x) + 0.3 * np.cos(2 * x))
    coarse = symmetry_consistency_test(spec, 0.3, u0, 0.5, SolverOptions(dt=2e-3))
    fine = symmetry_consistency_test(spec, 0.3, u0, 0.5, SolverOptions(dt=1e-3))
    assert coarse.discrepancy / fine.discrepancy >= 8


def test_translation_discrepancy_at_roundoff():
    g = make_grid(128)
    u0 = g.evaluate(lambda x: np.sin(x) + 0.3 * np.cos(2 * x))
    for name in ("hs", "dch"):
        for gid in ("v2", "v3" if name == "dch" else "v4"):
            spec = find_symmetry(EquationConfig.named(name), gid)
            rep = symmetry_consistency_test(spec, 0.3, u0, 0.5, OPTS)
            assert rep.discrepancy < 1e-11


def test_blow_up_propagates():
    g = make_grid(128)
    spec = find_symmetry(EquationConfig.named("kdv"), "v1")
    rep = symmetry_consistency_test(spec, 0.3, g.evaluate(np.sin), 0.5,
                                    SolverOptions(dt=5e-2, scheme="rk4"))
    assert rep.blew_up and rep.discrepancy == math.inf


def test_report_as_dict(kdv_traj):
    g = make_grid(32)
    spec = find_symmetry(EquationConfig.named("ch"), "v3")
    rep = symmetry_consistency_test(spec, 0.3, g.evaluate(np.sin), 0.05, OPTS)
    d = rep.as_dict()
    assert d["generator"] == "ch.v3" and d["equation"] == "ch"
    assert len(d["residuals"]) == 3


@pytest.mark.parametrize("spec", _specs(eps=1.0, compatible=True), ids=_ids)
def test_transformed_residual_within_five_times(spec):
    g = make_grid(128)
    u0 = g.evaluate(lambda x: np.sin(x) + 0.3 * np.cos(2 * x))
    rep = symmetry_consistency_test(spec, 0.3, u0, 0.25, OPTS)
    assert rep.discrepancy < 1e-4
    for r, ref in zip(rep.residuals, rep.reference_residuals):
        assert r <= 5 * ref
