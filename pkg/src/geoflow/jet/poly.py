"""Sparse multivariate polynomials with exact rational coefficients.

Variables are plain strings.  Jet coordinates are named ``u_`` followed by a
run of ``t`` and ``x`` letters; the name is canonicalised so ``u_xt`` and
``u_tx`` are the same variable.  A monomial is a sorted tuple of
``(variable, exponent)`` pairs.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering

__all__ = ["JetPoly", "jet_var", "jet_index", "is_jet_var", "canonical_name",
           "const", "var", "INDEPENDENT"]

INDEPENDENT = ("t", "x")
_JET_RE = re.compile(r"^u_([tx]+)$")


def jet_var(i_t: int, i_x: int) -> str:
    """Name of ``d^(i_t + i_x) u / dt^i_t dx^i_x``."""
    if i_t == 0 and i_x == 0:
        return "u"
    return "u_" + "t" * i_t + "x" * i_x


def jet_index(name: str):
    """Multi-index ``(i_t, i_x)`` of a jet variable, or ``None``."""
    if name == "u":
        return (0, 0)
    m = _JET_RE.match(name)
    if m is None:
        return None
    s = m.group(1)
    return (s.count("t"), s.count("x"))


def is_jet_var(name: str) -> bool:
    return jet_index(name) is not None


def canonical_name(name: str) -> str:
    idx = jet_index(name)
    return name if idx is None else jet_var(*idx)


@total_ordering
class _VarKey:
    # t < x < u < u_J (by order, then t-count) < everything else alphabetically
    __slots__ = ("key",)

    def __init__(self, name):
        if name in INDEPENDENT:
            self.key = (0, INDEPENDENT.index(name), 0, "")
        else:
            idx = jet_index(name)
            if idx is not None:
                self.key = (1, sum(idx), -idx[0], "")
            else:
                self.key = (2, 0, 0, name)

    def __eq__(self, other):
        return self.key == other.key

    def __lt__(self, other):
        return self.key < other.key


def _sort_vars(items):
    return tuple(sorted(items, key=lambda kv: _VarKey(kv[0])))


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return _sort_vars(d.items())


class JetPoly:
    """Immutable polynomial ``sum coeff * monomial`` over the rationals."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[mono] = c
        self._terms = clean
        self._hash = None

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, value) -> "JetPoly":
        return cls({(): Fraction(value)})

    @classmethod
    def variable(cls, name: str, power: int = 1) -> "JetPoly":
        return cls({((canonical_name(name), power),): Fraction(1)})

    @staticmethod
    def coerce(obj) -> "JetPoly":
        if isinstance(obj, JetPoly):
            return obj
        if isinstance(obj, (int, Fraction)):
            return JetPoly.constant(obj)
        if isinstance(obj, str):
            return JetPoly.variable(obj)
        raise TypeError(f"cannot convert {type(obj).__name__} to JetPoly")

    # inspection -----------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not mono for mono in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def variables(self) -> set:
        return {v for mono in self._terms for v, _ in mono}

    def jet_variables(self) -> set:
        return {v for v in self.variables() if is_jet_var(v)}

    def depends_only_on(self, allowed) -> bool:
        return self.variables() <= set(allowed)

    def degree(self, name: str) -> int:
        return max((dict(m).get(name, 0) for m in self._terms), default=0)

    def coefficient(self, name: str, power: int) -> "JetPoly":
        """Coefficient of ``name**power`` viewed as a polynomial in ``name``."""
        out = {}
        for mono, c in self._terms.items():
            d = dict(mono)
            if d.get(name, 0) == power:
                d.pop(name, None)
                key = _sort_vars(d.items())
                out[key] = out.get(key, 0) + c
        return JetPoly(out)

    def split(self, names) -> dict:
        """Group terms by their monomial in ``names``.

        Returns a mapping from that monomial to its coefficient polynomial in
        the remaining variables.
        """
        names = set(names)
        out = {}
        for mono, c in self._terms.items():
            inner = tuple((v, e) for v, e in mono if v in names)
            rest = tuple((v, e) for v, e in mono if v not in names)
            bucket = out.setdefault(inner, {})
            bucket[rest] = bucket.get(rest, 0) + c
        return {k: JetPoly(v) for k, v in out.items()}

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = JetPoly.coerce(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            out[mono] = out.get(mono, 0) + c
        return JetPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return JetPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-JetPoly.coerce(other))

    def __rsub__(self, other):
        return JetPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return JetPoly({m: c * other for m, c in self._terms.items()})
        other = JetPoly.coerce(other)
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return JetPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, JetPoly):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("can only divide by a nonzero rational constant")
            other = other.constant_value()
        other = Fraction(other)
        return JetPoly({m: c / other for m, c in self._terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = JetPoly.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # calculus and substitution ---------------------------------------------
    def diff(self, name: str) -> "JetPoly":
        """Partial derivative with respect to one variable."""
        name = canonical_name(name)
        out = {}
        for mono, c in self._terms.items():
            d = dict(mono)
            e = d.get(name, 0)
            if not e:
                continue
            if e == 1:
                del d[name]
            else:
                d[name] = e - 1
            key = _sort_vars(d.items())
            out[key] = out.get(key, 0) + c * e
        return JetPoly(out)

    def subs(self, mapping: dict) -> "JetPoly":
        """Simultaneously replace variables by polynomials."""
        mapping = {canonical_name(k): JetPoly.coerce(v) for k, v in mapping.items()}
        if not mapping:
            return self
        powers = {}

        def power(name, e):
            key = (name, e)
            if key not in powers:
                powers[key] = mapping[name] ** e
            return powers[key]

        result = JetPoly()
        for mono, c in self._terms.items():
            kept = tuple((v, e) for v, e in mono if v not in mapping)
            term = JetPoly({kept: c})
            for v, e in mono:
                if v in mapping:
                    term = term * power(v, e)
            result = result + term
        return result

    def evaluate(self, values: dict):
        """Numeric value with every variable taken from ``values``."""
        total = 0
        for mono, c in self._terms.items():
            term = float(c) if not isinstance(c, int) else c
            for v, e in mono:
                if v not in values:
                    raise KeyError(f"no value given for {v!r}")
                term = term * values[v] ** e
            total = total + term
        return total

    # comparison and display --------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, str)):
            other = JetPoly.coerce(other)
        if not isinstance(other, JetPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sorted_terms(self):
        def key(item):
            mono, _ = item
            deg = sum(e for _, e in mono)
            return (deg, [(_VarKey(v).key, e) for v, e in mono])
        return sorted(self._terms.items(), key=key)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            factors = [v if e == 1 else f"{v}^{e}" for v, e in mono]
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"JetPoly({self})"


def const(value) -> JetPoly:
    return JetPoly.constant(value)


def var(name: str) -> JetPoly:
    return JetPoly.variable(name)
