"""Hermite time stepping of Maxwell fields in dielectric and Lorentz/Sellmeier media."""
from .diagnostics import RunReport, fit_rate, hb_inner, hb_seminorm
from .exact import ExactSolution, exact_solution
from .grid import Grid, HermiteField
from .hbinterp import HBOperator, build_hb_operator, hb_project_field, interpolate_cell
from .media import MediumSpec, Pole, SymmetrizedSystem, assemble_system, dispersion_quartic_roots
from .stepper import InstabilityError, SolverConfig, half_step, run, self_start
from .tensorpoly import TensorPoly

__all__ = [
    "ExactSolution", "Grid", "HBOperator", "HermiteField", "InstabilityError", "MediumSpec",
    "Pole", "RunReport", "SolverConfig", "SymmetrizedSystem", "TensorPoly", "assemble_system",
    "build_hb_operator", "dispersion_quartic_roots", "exact_solution", "fit_rate", "half_step",
    "hb_inner", "hb_project_field", "hb_seminorm", "interpolate_cell", "run", "self_start",
]
