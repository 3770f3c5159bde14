"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test prints one ``ACCEPTANCE <n> PASS|FAIL`` line to the terminal.
"""
import time

import numpy as np
import pytest
import sympy as sp

from geoflow import checks, lie
from geoflow.geodesic import EquationConfig, SolverOptions, hopf_blowup_estimate, simulate
from geoflow.jet import SYMMETRIC_EQUATIONS, closure_check, generators, invariance_check, \
    pde_form, sign_flip_mutants, var
from geoflow.spectral import (GridField, analyze, diff_array, make_grid, synthesize,
                              trig_interpolate)
from geoflow.symmetry import list_symmetries, symmetry_consistency_test

U0 = "sin x + 0.3 cos 2x"


def u0_field(grid):
    return grid.evaluate(lambda x: np.sin(x) + 0.3 * np.cos(2 * x))


@pytest.fixture
def report(capsys):
    def emit(number, passed, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if passed else 'FAIL'}: {detail}")
        assert passed, detail
    return emit


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_criterion_01_exact_invariance(report):
    with Clock() as clock:
        zero, mutants, nonzero = 0, 0, 0
        for name in SYMMETRIC_EQUATIONS:
            pde = pde_form(name)
            for gen in generators(name):
                zero += invariance_check(gen.field, pde).holds
                for mut in sign_flip_mutants(gen.field):
                    mutants += 1
                    nonzero += not invariance_check(mut.field, pde).holds
    ok = zero == 18 and mutants >= 36 and nonzero == mutants and clock.seconds < 30
    report(1, ok, f"{zero}/18 generators exact zero; {nonzero}/{mutants} sign-flip mutants "
                  f"nonzero (36+ required); {clock.seconds:.1f}s")


def test_criterion_02_closure(report):
    with Clock() as clock:
        dims = [closure_check([g.field for g in generators(n)]) for n in SYMMETRIC_EQUATIONS]
        t = var("t")
        open_ = [closure_check([g.field for g in generators(n, F1=t * t)]) for n in ("hs", "dhs")]
    ok = (all(r.closed for r in dims) and [r.dimension for r in dims] == [3, 4, 4, 3, 4]
          and not any(r.closed for r in open_) and clock.seconds < 5)
    report(2, ok, f"dimensions {[r.dimension for r in dims]}; F1 = t^2 closes: "
                  f"{[r.closed for r in open_]}; {clock.seconds:.2f}s")


def test_criterion_03_cocycles(report):
    with Clock() as clock:
        recs = checks.cocycles(gf_samples=50, bt_samples=20, n=128, rng=checks.rng_from_env())
    by = {r["name"]: r["residual"] for r in recs}
    gf = by["Gel'fand-Fuchs cocycle identity"]
    bt = by["Bott-Thurston group cocycle identity"]
    ok = gf < 1e-9 and bt < 1e-7 and clock.seconds < 10
    report(3, ok, f"Gel'fand-Fuchs {gf:.2e} (<1e-9); Bott-Thurston {bt:.2e} (<1e-7); "
                  f"{clock.seconds:.2f}s")


def test_criterion_04_duality_and_jacobi(report):
    rng = checks.rng_from_env()
    grid = make_grid(128)
    with Clock() as clock:
        dual, jac = [], []
        for _ in range(50):
            u, v, m = (checks.random_trig(grid, rng) for _ in range(3))
            dual.append(abs(lie.pairing(lie.ad_star(u, m), v) + lie.pairing(m, lie.ad(u, v))))
            U, V, W = (lie.VirasoroVector(checks.random_trig(grid, rng), rng.normal())
                       for _ in range(3))
            terms = [lie.vir_bracket(A, lie.vir_bracket(B, C))
                     for A, B, C in ((U, V, W), (V, W, U), (W, U, V))]
            jac.append(max((terms[0].u + terms[1].u + terms[2].u).max_norm(),
                           abs(sum(t.a for t in terms))))
    ok = max(dual) < 1e-10 and max(jac) < 1e-9 and clock.seconds < 5
    report(4, ok, f"duality {max(dual):.2e} (<1e-10); Virasoro Jacobi {max(jac):.2e} "
                  f"(<1e-9); {clock.seconds:.2f}s")


def test_criterion_05_schwarzian(report):
    rng = checks.rng_from_env()
    grid = make_grid(256)
    maps = []
    for _ in range(10):
        c, d = rng.uniform(-0.3, 0.3), rng.uniform(0, 2 * np.pi)
        b, cc = rng.uniform(-0.5, 0.5), rng.uniform(-0.05, 0.05)
        maps.append((c, d, (1.0, b, cc, 1 + b * cc)))
    with Clock() as clock:
        ident = lie.schwarzian(lie.CircleDiffeo.identity(grid)).max_norm()
        invariance, spectral = 0.0, []
        for c, d, mob in maps:
            phi = lie.CircleDiffeo.from_function(grid, lambda x: x + c * np.sin(x + d))
            s_phi = lie.schwarzian(phi).values
            composite = checks.mobius_composite_schwarzian(phi, *mob)
            invariance = max(invariance, float(np.max(np.abs(composite - s_phi))))
            spectral.append(s_phi)
    # symbolic oracle for S(M o phi), outside the timed section
    xs = sp.Symbol("x")
    oracle = 0.0
    for (c, d, (a, b, cc, dd)), s_phi in zip(maps, spectral):
        phi_expr = xs + c * sp.sin(xs + d)
        g = (a * phi_expr + b) / (cc * phi_expr + dd)
        g1, g2, g3 = (sp.diff(g, xs, k) for k in (1, 2, 3))
        exact = sp.lambdify(xs, g3 / g1 - sp.Rational(3, 2) * (g2 / g1) ** 2, "numpy")
        oracle = max(oracle, float(np.max(np.abs(s_phi - exact(grid.points)))))
    ok = ident < 1e-13 and invariance < 1e-6 and oracle < 1e-6 and clock.seconds < 2
    report(5, ok, f"S(id) {ident:.1e} (<1e-13); Moebius invariance {invariance:.2e}, "
                  f"symbolic oracle {oracle:.2e} (<1e-6) on 10 maps; {clock.seconds:.2f}s")


def test_criterion_06_conservation(report):
    grid = make_grid(256)
    drifts = {}
    with Clock() as clock:
        for name in ("ch", "hs", "kdv", "dch", "dhs"):
            traj = simulate(EquationConfig.named(name), u0_field(grid), 1.0,
                            SolverOptions(dt=1e-3, store_every=50))
            e = traj.series("energy")
            drifts[name] = {"energy": float(np.max(np.abs(e - e[0])) / abs(e[0])),
                            "mass": float(np.max(np.abs(traj.series("mass") - traj.series("mass")[0]))),
                            "mean": float(np.max(np.abs(traj.series("momentum_mean")
                                                        - traj.series("momentum_mean")[0])))}
    ok = (all(d["energy"] < 1e-6 for d in drifts.values()) and drifts["kdv"]["mass"] < 1e-8
          and drifts["ch"]["mean"] < 1e-8 and clock.seconds < 60)
    worst = max(d["energy"] for d in drifts.values())
    report(6, ok, f"max relative energy drift {worst:.1e} (<1e-6); KdV mass "
                  f"{drifts['kdv']['mass']:.1e} (<1e-8); CH mean momentum "
                  f"{drifts['ch']['mean']:.1e} (<1e-8); u0 = {U0}; {clock.seconds:.1f}s")


def test_criterion_07_hopf_blowup(report):
    grid = make_grid(256)
    u0 = grid.evaluate(np.sin)
    with Clock() as clock:
        est = hopf_blowup_estimate(u0)
        traj = simulate(EquationConfig.named("hopf"), u0, 0.32,
                        SolverOptions(dt=1e-3, store_every=10, hopf_safety=None))
        slope = max(float(np.max(np.abs(diff_array(u.values, grid)))) for u in traj.snapshots)
    ok = (not traj.blew_up and traj.times[-1] == pytest.approx(0.32) and slope > 10
          and abs(est - 1 / 3) < 1e-12 and clock.seconds < 10)
    report(7, ok, f"max|u_x| by t=0.32 is {slope:.1f} (>10); estimate {est:.15f} "
                  f"(1/3 +- 1e-12); {clock.seconds:.2f}s")


def _pairs():
    return [spec for name in SYMMETRIC_EQUATIONS
            for spec in list_symmetries(EquationConfig.named(name)) if spec.grid_compatible]


def test_criterion_08_symmetry_harness(report):
    grid = make_grid(256)
    s = 0.3
    rows, ok = [], True
    with Clock() as clock:
        for spec in _pairs():
            coarse = symmetry_consistency_test(spec, s, u0_field(grid), 0.5, SolverOptions(dt=1e-3))
            fine = symmetry_consistency_test(spec, s, u0_field(grid), 0.5, SolverOptions(dt=5e-4))
            ratio = coarse.discrepancy / fine.discrepancy if fine.discrepancy else np.inf
            good = coarse.discrepancy < 1e-4 and ratio >= 8
            ok &= good
            rows.append(f"{spec.generator_id} {coarse.discrepancy:.1e}/{ratio:.1f}x"
                        + ("" if good else " (fail)"))
    ok &= clock.seconds < 300
    report(8, ok, f"{len(rows)} pairs at s={s}, u0 = {U0}, discrepancy/refinement ratio: "
                  + "; ".join(rows) + f"; {clock.seconds:.0f}s")


def test_criterion_09_kdv_traveling_wave(report):
    c, t_end, L = 16.0, 0.1, 2 * np.pi
    grid = make_grid(256)

    def profile(t):
        # periodic sum of c sech^2(sqrt(c)/2 (x - x0 - c t)) over neighbouring cells
        z = grid.points[:, None] - np.pi - c * t + L * np.arange(-3, 4)[None, :]
        return np.sum(c / np.cosh(np.sqrt(c) / 2 * z) ** 2, axis=1)

    # the profile solves u_t + 3 u u_x + u_xxx = 0 on the line
    x, tt = sp.symbols("x t")
    sol = c * sp.sech(sp.sqrt(c) / 2 * (x - c * tt)) ** 2
    pde = sp.diff(sol, tt) + 3 * sol * sp.diff(sol, x) + sp.diff(sol, x, 3)
    check = sp.lambdify((x, tt), pde, "numpy")(np.linspace(-4, 4, 33), 0.05)
    assert np.max(np.abs(check)) < 1e-8
    with Clock() as clock:
        traj = simulate(EquationConfig.named("kdv"), GridField(grid, profile(0.0)), t_end,
                        SolverOptions(dt=1e-4, store_every=1000))
        err = float(np.max(np.abs(traj.final.values - profile(t_end))))
    ok = err < 1e-3 and clock.seconds < 30
    report(9, ok, f"c=16 soliton shape error at t=0.1 is {err:.1e} (<1e-3); {clock.seconds:.2f}s")


def test_criterion_10_spectral_substrate(report):
    rng = np.random.default_rng(10)
    worst = {"round trip": 0.0, "derivative": 0.0, "interpolation": 0.0}
    with Clock() as clock:
        for n in (8, 16, 32, 64, 128, 256, 512):
            grid = make_grid(n)
            x = grid.points
            kmax = n // 2 - 1
            ks = np.arange(1, kmax + 1)
            a, b = rng.normal(size=(2, kmax)) / ks
            a0 = rng.normal()

            def f(z, order=0):
                z = np.asarray(z)[..., None]
                if order == 0:
                    return a0 + np.sum(a * np.cos(ks * z) + b * np.sin(ks * z), axis=-1)
                # d^r/dz^r of cos(kz) is k^r cos(kz + r pi/2)
                ph = order * np.pi / 2
                return np.sum(ks ** order * (a * np.cos(ks * z + ph) + b * np.sin(ks * z + ph)),
                              axis=-1)

            u = GridField(grid, f(x))
            scale = max(1.0, float(np.max(np.abs(u.values))))
            worst["round trip"] = max(worst["round trip"],
                                      float(np.max(np.abs(synthesize(analyze(u)).values
                                                          - u.values))) / scale)
            for order in (1, 2, 3):
                ref = f(x, order)
                err = float(np.max(np.abs(diff_array(u.values, grid, order) - ref)))
                worst["derivative"] = max(worst["derivative"],
                                          err / max(1.0, float(np.max(np.abs(ref)))))
            targets = rng.uniform(0, 2 * np.pi, 50)
            worst["interpolation"] = max(worst["interpolation"],
                                         float(np.max(np.abs(trig_interpolate(u, targets)
                                                             - f(targets)))) / scale)
    ok = all(v < 1e-12 for v in worst.values()) and clock.seconds < 5
    report(10, ok, "; ".join(f"{k} {v:.1e}" for k, v in worst.items())
                   + f" (all <1e-12, relative to max|f|); n = 8..512; {clock.seconds:.2f}s")
