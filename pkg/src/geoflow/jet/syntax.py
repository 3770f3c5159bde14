"""Plain-text syntax for PDEs and point vector fields.

Grammar (Python expression syntax, evaluated exactly)::

    equation  := expr "=" expr
    generator := [name "="] expr          # linear in d_t, d_x, d_u
    expr      := expr ("+" | "-") expr | expr "*" expr | expr "/" number
               | expr ("^" | "**") integer | "-" expr | "(" expr ")"
               | number | identifier
    identifier:= t | x | u | u_[tx]+ | eps | c<digits> | d_t | d_x | d_u

Numbers are integers or decimals and are converted to exact rationals.
Examples::

    u_t + 3*u*u_x + eps*u_xxx = 0
    v = x*d_x + 3*t*d_t - 2*u*d_u
"""
from __future__ import annotations

import ast
import re
from fractions import Fraction

from .calculus import PdeForm, PointVectorField
from .poly import JetPoly, canonical_name, is_jet_var

__all__ = ["JetSyntaxError", "parse_expression", "parse_pde", "parse_generator"]

_PARAM_RE = re.compile(r"^(eps|c\d+)$")
_DIRECTIONS = {"d_t": "T", "d_x": "X", "d_u": "U"}


class JetSyntaxError(ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class _Evaluator:
    def __init__(self, allow_directions, locate):
        self.allow_directions = allow_directions
        self.locate = locate

    def fail(self, node, msg):
        line, col = self.locate(getattr(node, "lineno", 1), getattr(node, "col_offset", 0))
        raise JetSyntaxError(msg, line, col)

    def number(self, node):
        value = self.visit(node)
        if not value.is_constant():
            self.fail(node, "expected a number")
        return value.constant_value()

    def visit(self, node):
        if isinstance(node, ast.Expression):
            return self.visit(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                self.fail(node, f"unsupported literal {node.value!r}")
            src = repr(node.value)
            return JetPoly.constant(Fraction(src))
        if isinstance(node, ast.Name):
            return self.name(node)
        if isinstance(node, ast.UnaryOp):
            operand = self.visit(node.operand)
            if isinstance(node.op, ast.USub):
                return -operand
            if isinstance(node.op, ast.UAdd):
                return operand
            self.fail(node, "unsupported unary operator")
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = self.visit(node.left)
                exp = self.number(node.right)
                if exp.denominator != 1 or exp < 0:
                    self.fail(node.right, "exponents must be non-negative integers")
                return base ** int(exp)
            left = self.visit(node.left)
            if isinstance(node.op, ast.Div):
                den = self.number(node.right)
                if den == 0:
                    self.fail(node.right, "division by zero")
                return left / den
            right = self.visit(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            self.fail(node, "unsupported operator")
        self.fail(node, f"unsupported syntax ({type(node).__name__})")

    def name(self, node):
        ident = node.id
        if ident in ("t", "x") or is_jet_var(ident) or _PARAM_RE.match(ident):
            return JetPoly.variable(canonical_name(ident))
        if ident in _DIRECTIONS:
            if not self.allow_directions:
                self.fail(node, f"{ident} is only allowed in vector fields")
            return JetPoly.variable(ident)
        self.fail(node, f"unknown identifier {ident!r}")


def _caret_to_pow(text):
    # '^' binds like '**'; remember where each one was so columns map back
    carets = [i for i, ch in enumerate(text) if ch == "^"]
    return text.replace("^", "**"), carets


def _parse_sides(text, allow_directions=False):
    """Parse ``expr`` or ``lhs = rhs`` into a list of (ast node, JetPoly) sides."""
    for pos, ch in enumerate(text):
        if ch in ",;":
            raise JetSyntaxError(f"unexpected {ch!r}", *_line_col(text, pos))
    eqs = [m.start() for m in re.finditer(r"(?<![=!<>])=(?!=)", text)]
    if len(eqs) > 1:
        raise JetSyntaxError("more than one '='", *_line_col(text, eqs[1]))
    # '=' -> ',' keeps every column in place; the outer parentheses allow
    # expressions to span several lines
    chars = list(text)
    for pos in eqs:
        chars[pos] = ","
    source, carets = _caret_to_pow("".join(chars))
    caret_lc = [_line_col(text, c) for c in carets]

    def locate(line, col0):
        col0 -= 1 if line == 1 else 0  # opening parenthesis
        shift = 0
        for cl, cc in caret_lc:
            if cl == line and col0 > cc - 1 + shift:
                shift += 1
        return line, max(col0 - shift, 0) + 1

    n_lines = text.count("\n") + 1
    try:
        tree = ast.parse("(" + source + "\n)", mode="eval")
    except SyntaxError as exc:
        msg = exc.msg.split(". Perhaps")[0]
        bad = _unbalanced(text)
        if bad is not None:
            raise JetSyntaxError(bad[0], *_line_col(text, bad[1])) from None
        line = min(exc.lineno or 1, n_lines)
        if (exc.lineno or 1) <= n_lines:
            offset = (exc.offset or 1) - 1
        else:
            offset = len(text.split("\n")[-1]) + (line == 1)
        raise JetSyntaxError(msg, *locate(line, offset)) from None
    body = tree.body
    nodes = body.elts if isinstance(body, ast.Tuple) else [body]
    if any(not side.strip() for side in "".join(chars).split(",")):
        raise JetSyntaxError("empty side of '='", *_line_col(text, eqs[0]))
    ev = _Evaluator(allow_directions, locate)
    return nodes, ev


def _unbalanced(text):
    stack = []
    for pos, ch in enumerate(text):
        if ch == "(":
            stack.append(pos)
        elif ch == ")":
            if not stack:
                return "unmatched ')'", pos
            stack.pop()
    return ("'(' was never closed", stack[0]) if stack else None


def _line_col(text, pos):
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def parse_expression(text: str) -> JetPoly:
    nodes, ev = _parse_sides(text)
    if len(nodes) != 1:
        raise JetSyntaxError("expected an expression, found an equation")
    return ev.visit(nodes[0])


def parse_pde(text: str, leading: str | None = None, name: str = "") -> PdeForm:
    """Parse ``lhs = rhs`` (or a bare expression meaning ``expr = 0``)."""
    nodes, ev = _parse_sides(text)
    delta = ev.visit(nodes[0])
    if len(nodes) == 2:
        delta = delta - ev.visit(nodes[1])
    if delta.is_zero():
        raise JetSyntaxError("equation is identically zero")
    return PdeForm.from_delta(delta, leading, name=name)


def parse_generator(text: str) -> PointVectorField:
    """Parse ``[v =] T*d_t + X*d_x + U*d_u``."""
    nodes, ev = _parse_sides(text, allow_directions=True)
    if len(nodes) == 2:
        if not isinstance(nodes[0], ast.Name):
            ev.fail(nodes[0], "left-hand side of a vector field must be a name")
        nodes = nodes[1:]
    expr = ev.visit(nodes[0])
    comps = {"T": JetPoly(), "X": JetPoly(), "U": JetPoly()}
    for mono, coeff in expr.split(_DIRECTIONS).items():
        dirs = dict(mono)
        if sum(dirs.values()) != 1:
            what = "*".join(d if e == 1 else f"{d}^{e}" for d, e in mono) or str(coeff)
            problem = "is not linear in" if dirs else "has no factor among"
            ev.fail(nodes[0], f"term {what} {problem} d_t, d_x, d_u")
        (d,) = dirs
        comps[_DIRECTIONS[d]] = coeff
    return PointVectorField(comps["T"], comps["X"], comps["U"])
