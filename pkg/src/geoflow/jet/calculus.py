"""Prolongation of point vector fields and the infinitesimal invariance test."""
from __future__ import annotations

from dataclasses import dataclass, field

from .poly import INDEPENDENT, JetPoly, is_jet_var, jet_index, jet_var

__all__ = [
    "total_derivative",
    "total_derivative_multi",
    "PointVectorField",
    "PdeForm",
    "prolong",
    "prolong_characteristic",
    "reduce_on_solutions",
    "InvarianceResult",
    "invariance_check",
    "vf_bracket",
    "ClosureResult",
    "closure_check",
]

_STEP = {"t": (1, 0), "x": (0, 1)}


def _raise(idx, direction):
    dt, dx = _STEP[direction]
    return (idx[0] + dt, idx[1] + dx)


def total_derivative(p: JetPoly, var: str) -> JetPoly:
    """``D_var p = dp/dvar + sum_J u_{J,var} dp/du_J``."""
    if var not in _STEP:
        raise ValueError(f"total derivatives are taken in t or x, not {var!r}")
    p = JetPoly.coerce(p)
    out = p.diff(var)
    for w in p.jet_variables():
        out = out + JetPoly.variable(jet_var(*_raise(jet_index(w), var))) * p.diff(w)
    return out


def total_derivative_multi(p: JetPoly, index) -> JetPoly:
    """Apply ``D_t^i D_x^j`` for ``index = (i, j)``."""
    for _ in range(index[0]):
        p = total_derivative(p, "t")
    for _ in range(index[1]):
        p = total_derivative(p, "x")
    return p


@dataclass(frozen=True)
class PointVectorField:
    """``T d_t + X d_x + U d_u`` with coefficients depending on ``(t, x, u)``.

    Coefficients may also contain symbolic parameters such as ``eps``.
    """

    T: JetPoly = field(default_factory=JetPoly)
    X: JetPoly = field(default_factory=JetPoly)
    U: JetPoly = field(default_factory=JetPoly)

    def __post_init__(self):
        for name in ("T", "X", "U"):
            coeff = JetPoly.coerce(getattr(self, name))
            object.__setattr__(self, name, coeff)
            bad = {v for v in coeff.jet_variables() if v != "u"}
            if bad:
                raise ValueError(
                    f"coefficient {name} depends on jet variables {sorted(bad)}; "
                    "point vector fields depend on t, x, u only")

    @property
    def components(self):
        return (self.T, self.X, self.U)

    def apply(self, f: JetPoly) -> JetPoly:
        """Derivation ``v(f) = T f_t + X f_x + U f_u``."""
        f = JetPoly.coerce(f)
        return self.T * f.diff("t") + self.X * f.diff("x") + self.U * f.diff("u")

    def characteristic(self) -> JetPoly:
        return self.U - self.T * JetPoly.variable("u_t") - self.X * JetPoly.variable("u_x")

    def __add__(self, other):
        return PointVectorField(self.T + other.T, self.X + other.X, self.U + other.U)

    def __sub__(self, other):
        return PointVectorField(self.T - other.T, self.X - other.X, self.U - other.U)

    def __neg__(self):
        return PointVectorField(-self.T, -self.X, -self.U)

    def scale(self, c) -> "PointVectorField":
        return PointVectorField(self.T * c, self.X * c, self.U * c)

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def subs(self, mapping) -> "PointVectorField":
        return PointVectorField(*(c.subs(mapping) for c in self.components))

    def __str__(self):
        parts = []
        for coeff, d in zip(self.components, ("d_t", "d_x", "d_u")):
            if coeff.is_zero():
                continue
            if coeff == 1:
                parts.append(d)
            elif len(coeff.terms) == 1:
                parts.append(f"{coeff}*{d}")
            else:
                parts.append(f"({coeff})*{d}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def _max_order(p: JetPoly) -> int:
    return max((sum(jet_index(w)) for w in p.jet_variables()), default=0)


def _dominates(idx, lead):
    return idx[0] >= lead[0] and idx[1] >= lead[1]


@dataclass(frozen=True)
class PdeForm:
    """A scalar PDE ``delta = 0`` solved for one jet variable.

    ``delta`` equals ``c * (leading - solved_rhs)`` for a nonzero rational
    ``c``, and no jet variable of ``solved_rhs`` is a derivative of the
    leading one, so the leading derivative and all its total derivatives can
    be eliminated.
    """

    delta: JetPoly
    leading: str
    solved_rhs: JetPoly
    name: str = ""

    @classmethod
    def from_delta(cls, delta: JetPoly, leading: str | None = None, name: str = "") -> "PdeForm":
        delta = JetPoly.coerce(delta)
        if leading is None:
            leading = choose_leading(delta)
        coeff = delta.diff(leading)
        if delta.degree(leading) != 1 or not coeff.is_constant() or coeff.is_zero():
            raise ValueError(
                f"{leading} does not enter {delta} linearly with a constant coefficient; "
                "it cannot be eliminated")
        c = coeff.constant_value()
        rhs = -(delta - JetPoly.variable(leading) * c) / c
        lead_idx = jet_index(leading)
        blocking = sorted(w for w in rhs.jet_variables() if _dominates(jet_index(w), lead_idx))
        if blocking:
            raise ValueError(
                f"solving for {leading} leaves its derivatives {blocking} on the right-hand side")
        return cls(delta, leading, rhs, name)

    @property
    def order(self) -> int:
        return _max_order(self.delta)


def choose_leading(delta: JetPoly) -> str:
    """Pick the highest-order time derivative that can be isolated."""
    candidates = []
    jet_vars = delta.jet_variables()
    for w in jet_vars:
        idx = jet_index(w)
        if idx[0] == 0:
            continue
        coeff = delta.diff(w)
        if delta.degree(w) != 1 or not coeff.is_constant():
            continue
        if any(_dominates(jet_index(o), idx) for o in jet_vars if o != w):
            continue
        candidates.append((sum(idx), idx[0], w))
    if not candidates:
        raise ValueError(f"no time derivative of {delta} can be isolated with a constant coefficient")
    return max(candidates)[2]


def prolong(v: PointVectorField, order: int) -> dict:
    """Coefficients ``phi^J`` of the prolongation for all ``|J| <= order``.

    Keys are multi-indices ``(i_t, i_x)``; ``(0, 0)`` maps to ``U``.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    phi = {(0, 0): v.U}
    for total in range(1, order + 1):
        for i_t in range(total, -1, -1):
            idx = (i_t, total - i_t)
            if idx[1] > 0:
                parent, k = (idx[0], idx[1] - 1), "x"
            else:
                parent, k = (idx[0] - 1, idx[1]), "t"
            ut = JetPoly.variable(jet_var(*_raise(parent, "t")))
            ux = JetPoly.variable(jet_var(*_raise(parent, "x")))
            phi[idx] = (total_derivative(phi[parent], k)
                        - total_derivative(v.T, k) * ut
                        - total_derivative(v.X, k) * ux)
    return phi


def prolong_characteristic(v: PointVectorField, order: int) -> dict:
    """Same coefficients via ``phi^J = D_J Q + T u_{J,t} + X u_{J,x}``."""
    Q = v.characteristic()
    out = {}
    for total in range(order + 1):
        for i_t in range(total, -1, -1):
            idx = (i_t, total - i_t)
            out[idx] = (total_derivative_multi(Q, idx)
                        + v.T * JetPoly.variable(jet_var(*_raise(idx, "t")))
                        + v.X * JetPoly.variable(jet_var(*_raise(idx, "x"))))
    return out


def reduce_on_solutions(p: JetPoly, pde: PdeForm) -> JetPoly:
    """Eliminate the leading derivative of ``pde`` and all its derivatives."""
    lead = jet_index(pde.leading)
    cache = {}
    active = set()

    def replacement(idx):
        if idx in cache:
            return cache[idx]
        if idx in active:
            raise RecursionError(f"elimination of {jet_var(*idx)} does not terminate")
        active.add(idx)
        if idx == lead:
            expr = pde.solved_rhs
        elif idx[0] > lead[0]:
            expr = total_derivative(replacement((idx[0] - 1, idx[1])), "t")
        else:
            expr = total_derivative(replacement((idx[0], idx[1] - 1)), "x")
        expr = eliminate(expr)
        active.discard(idx)
        cache[idx] = expr
        return expr

    def eliminate(expr):
        while True:
            targets = [w for w in expr.jet_variables() if _dominates(jet_index(w), lead)]
            if not targets:
                return expr
            expr = expr.subs({w: replacement(jet_index(w)) for w in targets})

    return eliminate(JetPoly.coerce(p))


@dataclass(frozen=True)
class InvarianceResult:
    holds: bool
    remainder: JetPoly
    unreduced: JetPoly


def apply_prolongation(v: PointVectorField, delta: JetPoly, order: int | None = None) -> JetPoly:
    """``pr v [delta]``."""
    order = _max_order(delta) if order is None else order
    phi = prolong(v, order)
    out = v.T * delta.diff("t") + v.X * delta.diff("x")
    for idx, coeff in phi.items():
        d = delta.diff(jet_var(*idx))
        if not d.is_zero():
            out = out + coeff * d
    return out


def invariance_check(v: PointVectorField, pde: PdeForm) -> InvarianceResult:
    """Infinitesimal invariance criterion ``pr v[delta] = 0`` on ``delta = 0``."""
    unreduced = apply_prolongation(v, pde.delta)
    remainder = reduce_on_solutions(unreduced, pde)
    return InvarianceResult(remainder.is_zero(), remainder, unreduced)


def vf_bracket(v: PointVectorField, w: PointVectorField) -> PointVectorField:
    """Lie bracket with components ``v(w_i) - w(v_i)``."""
    return PointVectorField(*(v.apply(wi) - w.apply(vi)
                              for vi, wi in zip(v.components, w.components)))


# -- closure ------------------------------------------------------------------

_BASE = ("t", "x", "u")


def _coordinates(v: PointVectorField) -> dict:
    coords = {}
    for comp, coeff in zip("TXU", v.components):
        for mono, c in coeff.split(_BASE).items():
            coords[(comp, mono)] = c
    return coords


def _solve(columns, target):
    """Solve ``sum_k c_k columns[k] = target`` over Q[params].

    Pivots are restricted to nonzero rational constants.  Returns
    ``(solution or None, rank)``.
    """
    keys = set(target)
    for col in columns:
        keys |= set(col)
    keys = sorted(keys, key=repr)
    ncol = len(columns)
    rows = [[col.get(k, JetPoly()) for col in columns] + [target.get(k, JetPoly())]
            for k in keys]
    pivots = []
    used = set()
    for c in range(ncol):
        pivot = None
        for r, row in enumerate(rows):
            if r not in used and row[c].is_constant() and not row[c].is_zero():
                pivot = r
                break
        if pivot is None:
            if any(r not in used and not row[c].is_zero() for r, row in enumerate(rows)):
                raise ValueError("elimination needs a non-constant pivot")
            continue
        used.add(pivot)
        pivots.append((c, pivot))
        pv = rows[pivot][c].constant_value()
        rows[pivot] = [e / pv for e in rows[pivot]]
        for r, row in enumerate(rows):
            if r != pivot and not row[c].is_zero():
                f = row[c]
                rows[r] = [a - f * b for a, b in zip(row, rows[pivot])]
    rank = len(pivots)
    consistent = all(rows[r][-1].is_zero() for r in range(len(rows)) if r not in used)
    if not consistent:
        return None, rank
    solution = [JetPoly() for _ in range(ncol)]
    for c, r in pivots:
        solution[c] = rows[r][-1]
    return solution, rank


@dataclass
class ClosureResult:
    closed: bool
    dimension: int
    structure_constants: dict = field(default_factory=dict)
    witness: tuple | None = None

    def __bool__(self):
        return self.closed


def closure_check(generators) -> ClosureResult:
    """Check that all pairwise brackets lie in the span of ``generators``.

    ``structure_constants[(i, j)]`` lists the coefficients of ``[v_i, v_j]``
    in the basis; on failure ``witness`` is ``(i, j, bracket)``.
    """
    gens = list(generators)
    cols = [_coordinates(g) for g in gens]
    _, rank = _solve(cols, {})
    if rank < len(gens):
        raise ValueError("generators are linearly dependent")
    constants = {}
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            br = vf_bracket(gens[i], gens[j])
            sol, _ = _solve(cols, _coordinates(br))
            if sol is None:
                return ClosureResult(False, len(gens), constants, (i, j, br))
            constants[(i, j)] = sol
    return ClosureResult(True, len(gens), constants)


def is_parameter(name: str) -> bool:
    return name not in INDEPENDENT and not is_jet_var(name)
