"""Randomised property suites used by the command line tools.

Each check returns a record ``{"name", "residual", "tolerance", "passed"}``;
exact symbolic checks use ``residual`` for the remainder as a string.
"""
from __future__ import annotations

import os

import numpy as np

from . import lie
from .jet import catalog
from .jet.calculus import closure_check, invariance_check
from .jet.poly import var
from .spectral import GridField, make_grid

SUITES = ("diffeo-actions", "virasoro", "cocycles", "invariance", "closure")


def rng_from_env(seed=None) -> np.random.Generator:
    if seed is None:
        raw = os.environ.get("GEOFLOW_SEED")
        seed = int(raw) if raw not in (None, "") else 20240611
    return np.random.default_rng(seed)


def random_trig(grid, rng, degree=5, mean=True) -> GridField:
    x = grid.points
    vals = np.zeros(grid.n)
    if mean:
        vals += rng.normal()
    for k in range(1, degree + 1):
        a, b = rng.normal(size=2) / k
        vals += a * np.cos(k * x) + b * np.sin(k * x)
    return GridField(grid, vals)


def random_diffeo(grid, rng, max_amp=0.3) -> lie.CircleDiffeo:
    c = rng.uniform(-max_amp, max_amp)
    d = rng.uniform(0, 2 * np.pi)
    return lie.CircleDiffeo.from_function(grid, lambda x: x + c * np.sin(x + d))


def _record(name, residual, tol):
    return {"name": name, "residual": float(residual), "tolerance": tol,
            "passed": bool(residual < tol)}


def _worst(name, values, tol):
    return _record(name, max(values), tol)


def mobius_composite_schwarzian(phi: lie.CircleDiffeo, a, b, c, d) -> np.ndarray:
    """Schwarzian of ``M o phi`` for ``M(y) = (a y + b)/(c y + d)``.

    Derivatives of the composite come from the chain rule applied to the
    spectral derivatives of ``phi``.
    """
    y = phi.lift_values
    den = c * y + d
    if np.any(den <= 0):
        raise ValueError("Moebius pole inside the range of phi")
    det = a * d - b * c
    m1 = det / den ** 2
    m2 = -2 * c * det / den ** 3
    m3 = 6 * c * c * det / den ** 4
    p1, p2, p3 = (phi.derivative(k).values for k in (1, 2, 3))
    g1 = m1 * p1
    g2 = m2 * p1 ** 2 + m1 * p2
    g3 = m3 * p1 ** 3 + 3 * m2 * p1 * p2 + m1 * p3
    return lie.schwarzian_values(g1, g2, g3)


def diffeo_actions(samples=20, n=128, rng=None) -> list:
    rng = rng or rng_from_env()
    grid = make_grid(n)
    anti, jac, dual, hom, pair, infl = [], [], [], [], [], []
    for _ in range(samples):
        u, v, w, m = (random_trig(grid, rng) for _ in range(4))
        anti.append((lie.ad(u, v) + lie.ad(v, u)).max_norm())
        jac.append((lie.ad(u, lie.ad(v, w)) + lie.ad(v, lie.ad(w, u))
                    + lie.ad(w, lie.ad(u, v))).max_norm())
        dual.append(abs(lie.pairing(lie.ad_star(u, m), v) + lie.pairing(m, lie.ad(u, v))))
        phi, psi = random_diffeo(grid, rng), random_diffeo(grid, rng)
        lhs = lie.adjoint_group_action(phi.compose(psi), u)
        rhs = lie.adjoint_group_action(phi, lie.adjoint_group_action(psi, u))
        hom.append((lhs - rhs).max_norm())
        pulled = lie.coadjoint_group_action(phi, lie.VirasoroMomentum(m, 0.0)).m
        pair.append(abs(lie.pairing(pulled, u)
                        - lie.pairing(m, lie.adjoint_group_action(phi, u))))
        h = 1e-4
        plus = lie.CircleDiffeo(grid, grid.points + h * w.values * 0.1)
        minus = lie.CircleDiffeo(grid, grid.points - h * w.values * 0.1)
        deriv = (lie.adjoint_group_action(plus, u) - lie.adjoint_group_action(minus, u)) / (2 * h)
        infl.append((deriv + lie.ad(w * 0.1, u)).max_norm())
    return [
        _worst("ad antisymmetry", anti, 1e-13),
        _worst("ad Jacobi identity", jac, 1e-9),
        _worst("ad/ad* duality", dual, 1e-10),
        _worst("Ad representation property", hom, 1e-7),
        _worst("Ad/Ad* pairing compatibility", pair, 1e-7),
        _worst("Ad linearisation equals -ad", infl, 1e-6),
    ]


def virasoro(samples=20, n=128, rng=None) -> list:
    rng = rng or rng_from_env()
    grid = make_grid(n)
    jac, anti, dual, red, schw = [], [], [], [], []
    for _ in range(samples):
        U, V, W = (lie.VirasoroVector(random_trig(grid, rng), rng.normal()) for _ in range(3))
        m, e = random_trig(grid, rng), rng.normal()
        terms = [lie.vir_bracket(A, lie.vir_bracket(B, C))
                 for A, B, C in ((U, V, W), (V, W, U), (W, U, V))]
        jac.append(max(sum((t.u for t in terms[1:]), terms[0].u).max_norm(),
                       abs(sum(t.a for t in terms))))
        uv, vu = lie.vir_bracket(U, V), lie.vir_bracket(V, U)
        anti.append(max((uv.u + vu.u).max_norm(), abs(uv.a + vu.a)))
        # the u_xxx term pairs with the bracket at central charge -eps
        lhs = lie.vir_pairing(lie.vir_ad_star(U, lie.VirasoroMomentum(m, e)), V)
        rhs = -lie.vir_pairing(lie.VirasoroMomentum(m, -e), uv)
        dual.append(abs(lhs - rhs))
        red.append((lie.vir_ad_star(U, lie.VirasoroMomentum(m, 0.0)).m
                    - lie.ad_star(U.u, m)).max_norm())
        phi = random_diffeo(grid, rng, 0.1)
        a, b, c = 1.0, rng.uniform(-0.5, 0.5), rng.uniform(-0.05, 0.05)
        d = (1 + b * c) / a
        composite = mobius_composite_schwarzian(phi, a, b, c, d)
        schw.append(float(np.max(np.abs(composite - lie.schwarzian(phi).values))))
    ident = lie.schwarzian(lie.CircleDiffeo.identity(grid)).max_norm()
    return [
        _worst("Virasoro Jacobi identity", jac, 1e-9),
        _worst("Virasoro bracket antisymmetry", anti, 1e-10),
        _worst("Virasoro coadjoint duality", dual, 1e-10),
        _worst("central term vanishes at eps = 0", red, 1e-15),
        _record("Schwarzian of identity", ident, 1e-13),
        _worst("Schwarzian Moebius invariance", schw, 1e-6),
    ]


def cocycles(gf_samples=50, bt_samples=20, n=128, rng=None) -> list:
    rng = rng or rng_from_env()
    grid = make_grid(n)
    gf, gf_anti, bt = [], [], []
    for _ in range(gf_samples):
        u, v, w = (random_trig(grid, rng) for _ in range(3))
        omega = lie.gelfand_fuchs
        gf.append(abs(omega(lie.ad(u, v), w) + omega(lie.ad(w, u), v) + omega(lie.ad(v, w), u)))
        gf_anti.append(abs(omega(u, v) + omega(v, u)))
    for _ in range(bt_samples):
        phi, zeta, psi = (random_diffeo(grid, rng) for _ in range(3))
        B = lie.bott_thurston
        bt.append(abs(B(phi.compose(zeta), psi) + B(phi, zeta)
                      - B(phi, zeta.compose(psi)) - B(zeta, psi)))
    return [
        _worst("Gel'fand-Fuchs cocycle identity", gf, 1e-9),
        _worst("Gel'fand-Fuchs antisymmetry", gf_anti, 1e-10),
        _worst("Bott-Thurston group cocycle identity", bt, 1e-7),
    ]


def invariance(include_mutants=True) -> list:
    out = []
    for name in catalog.SYMMETRIC_EQUATIONS:
        pde = catalog.pde_form(name)
        for gen in catalog.generators(name):
            res = invariance_check(gen.field, pde)
            out.append({"name": f"{gen.id} is a symmetry", "field": str(gen.field),
                        "residual": str(res.remainder), "tolerance": "exact zero",
                        "passed": res.holds})
            if not include_mutants:
                continue
            for mut in catalog.sign_flip_mutants(gen.field):
                res = invariance_check(mut.field, pde)
                expect = mut.equivalent  # -v is again a symmetry
                label = f"{gen.id} mutant ({mut.description}" + (", equals -v)" if expect else ")")
                out.append({"name": label,
                            "field": str(mut.field), "residual": str(res.remainder),
                            "tolerance": "zero" if expect else "nonzero",
                            "equivalent": mut.equivalent,
                            "passed": res.holds == expect})
    return out


def closure(F1=None) -> list:
    out = []
    for name in catalog.SYMMETRIC_EQUATIONS:
        fields = [g.field for g in catalog.generators(name)]
        res = closure_check(fields)
        out.append({"name": f"{name} algebra closes", "dimension": res.dimension,
                    "structure_constants": _constants(res),
                    "passed": res.closed})
    F1 = var("t") ** 2 if F1 is None else F1
    for name in ("hs", "dhs"):
        fields = [g.field for g in catalog.generators(name, F1=F1)]
        res = closure_check(fields)
        out.append({"name": f"{name} algebra with F1 = {F1} does not close",
                    "witness": None if res.witness is None else str(res.witness),
                    "passed": not res.closed})
    return out


def _constants(res):
    return {f"[v{i + 1},v{j + 1}]": [str(c) for c in coeffs]
            for (i, j), coeffs in sorted(res.structure_constants.items())}


def run_suite(name: str, rng=None) -> list:
    if name == "diffeo-actions":
        return diffeo_actions(rng=rng)
    if name == "virasoro":
        return virasoro(rng=rng)
    if name == "cocycles":
        return cocycles(rng=rng)
    if name == "invariance":
        return invariance()
    if name == "closure":
        return closure()
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
