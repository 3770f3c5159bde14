"""Exact jet-space calculus for Lie point symmetries."""
from .poly import JetPoly, jet_var, jet_index, const, var
from .calculus import (
    PointVectorField, PdeForm, InvarianceResult, ClosureResult,
    total_derivative, prolong, prolong_characteristic, reduce_on_solutions,
    apply_prolongation, invariance_check, vf_bracket, closure_check,
)
from .catalog import (
    EPS, EQUATION_NAMES, SYMMETRIC_EQUATIONS, PRINTED_VARIANTS,
    Generator, Mutant, pde_form, generators, sign_flip_mutants,
)
from .syntax import JetSyntaxError, parse_expression, parse_pde, parse_generator
