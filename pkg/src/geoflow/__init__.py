"""Geodesic flows on Diff+(S^1) and the Virasoro-Bott group, with exact
Lie point symmetry analysis of the resulting equations."""
from .geodesic import (EquationConfig, Group, SolverOptions, Trajectory, evolve,
                       hopf_blowup_estimate, invariants, residual, rhs, simulate)
from .inertia import H1, H1_DOT, L2, MetricParams
from .spectral import GridField, PeriodicGrid, make_grid
from .symmetry import list_symmetries, symmetry_consistency_test, transform_solution

__version__ = "0.1.0"
