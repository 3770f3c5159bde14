"""Jet-space forms of the geodesic equations and their symmetry generators.

The dispersive equations carry the central parameter as the symbol ``eps``,
so every check below holds for all values of it at once.  Where a generator
depends on the central parameter it is written with ``eps`` as well.

Two generators differ from the commonly printed tables:

* the Galilean boost of ``u_t + 3 u u_x + eps u_xxx = 0`` is
  ``3 t d_x + d_u`` (``t d_x + d_u`` belongs to ``u_t + u u_x + ...``);
* the scaling of the dispersive Hunter-Saxton equation is
  ``-t d_t + (u - eps) d_u``.

Both printed variants are available from :data:`PRINTED_VARIANTS`.
"""
from __future__ import annotations

from dataclasses import dataclass

from .calculus import PdeForm, PointVectorField
from .poly import JetPoly, const, var

__all__ = [
    "EPS",
    "EQUATION_NAMES",
    "SYMMETRIC_EQUATIONS",
    "pde_form",
    "Generator",
    "generators",
    "PRINTED_VARIANTS",
    "Mutant",
    "sign_flip_mutants",
]

EPS = var("eps")
t, x, u = var("t"), var("x"), var("u")
u_t, u_x, u_xx, u_xxx = var("u_t"), var("u_x"), var("u_xx"), var("u_xxx")
u_txx = var("u_txx")

EQUATION_NAMES = ("hopf", "hopf1", "ch", "hs", "kdv", "dch", "dhs")
# the Hopf equation is excluded from the symmetry tables
SYMMETRIC_EQUATIONS = ("ch", "hs", "kdv", "dch", "dhs")


def pde_form(name: str, eps: JetPoly | int = EPS) -> PdeForm:
    """Jet form of a named equation.

    ``hopf`` is ``u_t + 3 u u_x``; ``hopf1`` is the unit-coefficient form
    ``u_t + u u_x`` (the two are related by ``u -> 3u``).
    """
    eps = JetPoly.coerce(eps)
    ch_part = u_t - u_txx + 3 * u * u_x - 2 * u_x * u_xx - u * u_xxx
    hs_part = u_txx + 2 * u_x * u_xx + u * u_xxx
    forms = {
        "hopf": (u_t + 3 * u * u_x, "u_t"),
        "hopf1": (u_t + u * u_x, "u_t"),
        "ch": (ch_part, "u_txx"),
        "hs": (hs_part, "u_txx"),
        "kdv": (u_t + 3 * u * u_x + eps * u_xxx, "u_t"),
        "dch": (ch_part + eps * u_xxx, "u_txx"),
        "dhs": (hs_part - eps * u_xxx, "u_txx"),
    }
    try:
        delta, leading = forms[name]
    except KeyError:
        raise ValueError(f"unknown equation {name!r}; choose from {EQUATION_NAMES}") from None
    return PdeForm.from_delta(delta, leading, name=name)


@dataclass(frozen=True)
class Generator:
    id: str
    kind: str
    field: PointVectorField


def _vf(T=0, X=0, U=0):
    return PointVectorField(JetPoly.coerce(T), JetPoly.coerce(X), JetPoly.coerce(U))


def generators(name: str, F1: JetPoly | None = None, F2: JetPoly | None = None,
               eps: JetPoly | int = EPS) -> list:
    """Spanning vector fields of the symmetry algebra of ``name``.

    ``F1`` and ``F2`` are the free functions of time in the Hunter-Saxton
    algebras (polynomials in ``t``; defaults ``t`` and ``1``).
    """
    eps = JetPoly.coerce(eps)
    F1 = t if F1 is None else JetPoly.coerce(F1)
    F2 = const(1) if F2 is None else JetPoly.coerce(F2)
    for label, F in (("F1", F1), ("F2", F2)):
        if not F.depends_only_on({"t"}):
            raise ValueError(f"{label} must depend on t only, got {F}")
    dF1, ddF1 = F1.diff("t"), F1.diff("t").diff("t")
    hs_v3 = _vf(F1, x * dF1, x * ddF1)
    hs_v4 = _vf(0, F2, F2.diff("t"))
    half = const(1) / 2
    table = {
        "ch": [
            ("v1", "scaling", _vf(-t, 0, u)),
            ("v2", "time translation", _vf(1)),
            ("v3", "space translation", _vf(0, 1)),
        ],
        "hs": [
            ("v1", "scaling", _vf(-t, 0, u)),
            ("v2", "time translation", _vf(1)),
            ("v3", "scaling", hs_v3),
            ("v4", "generalised Galilean boost", hs_v4),
        ],
        "kdv": [
            ("v1", "space translation", _vf(0, 1)),
            ("v2", "time translation", _vf(1)),
            ("v3", "Galilean boost", _vf(0, 3 * t, 1)),
            ("v4", "scaling", _vf(3 * t, x, -2 * u)),
        ],
        "dch": [
            ("v1", "scaling", _vf(-t, 3 * half * eps * t, u + half * eps)),
            ("v2", "time translation", _vf(1)),
            ("v3", "space translation", _vf(0, 1)),
        ],
        "dhs": [
            ("v1", "scaling", _vf(-t, 0, u - eps)),
            ("v2", "time translation", _vf(1)),
            ("v3", "scaling", hs_v3),
            ("v4", "generalised Galilean boost", hs_v4),
        ],
    }
    if name not in table:
        if name in ("hopf", "hopf1"):
            raise ValueError(
                "the Hopf symmetry coefficients are implicit and function valued; "
                "no spanning generators are tabulated for it")
        raise ValueError(f"unknown equation {name!r}")
    return [Generator(f"{name}.{gid}", kind, vf) for gid, kind, vf in table[name]]


PRINTED_VARIANTS = {
    "kdv.v3": _vf(0, t, 1),
    "dhs.v1": _vf(-t, 0, u + 1),
}


@dataclass(frozen=True)
class Mutant:
    description: str
    field: PointVectorField
    equivalent: bool  # True when the mutant is -v, hence still a symmetry


def _flip_term(coeff: JetPoly, mono) -> JetPoly:
    terms = coeff.terms
    terms[mono] = -terms[mono]
    return JetPoly(terms)


def sign_flip_mutants(v: PointVectorField) -> list:
    """Every field obtained from ``v`` by flipping the sign of one term.

    A term is either a whole component (``T``, ``X`` or ``U``) or a single
    monomial inside a component; duplicates are listed once.  Mutants equal
    to ``-v`` are flagged as equivalent.
    """
    seen = {}
    comps = list(v.components)
    for ci, (label, coeff) in enumerate(zip("TXU", comps)):
        if coeff.is_zero():
            continue
        new = comps.copy()
        new[ci] = -coeff
        seen.setdefault(PointVectorField(*new), f"flip {label}")
        if len(coeff.terms) > 1:
            for mono, c in coeff.sorted_terms():
                new = comps.copy()
                new[ci] = _flip_term(coeff, mono)
                mono_str = str(JetPoly({mono: c}))
                seen.setdefault(PointVectorField(*new), f"flip {mono_str} in {label}")
    minus_v = -v
    return [Mutant(desc, vf, vf == minus_v) for vf, desc in seen.items()]
