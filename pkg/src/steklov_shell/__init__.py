"""Steklov-Dirichlet eigenvalues of eccentric spherical shells in R^(n+2).

Finite sections of the Dirichlet-to-Neumann operator in bispherical
coordinates, an exact-arithmetic-free eigensolver, and a Rayleigh-quotient
certificate for the computed eigenvalue.
"""

from .driver import (ConvergenceReport, SweepGrid, SweepOptions, SweepRecord, ValidationReport,
                     concentric_exact, converge_sigma, eccentric_lower_bound, sweep, table1,
                     validate_sigma)
from .errors import (DegenerateFrameError, EigenSolverError, GeometryError, QuadratureError,
                     SteklovError, TouchingBoundariesError)
from .geometry import BisphericalFrame, BisphericalPoint, ShellConfig, derive_frame
from .operator import TridiagonalMatrix, assemble
from .precision import BINARY64, EXTENDED, Arith, get_arith
from .rayleigh import (TruncatedEigenfunction, boundary_normal_series, eval_gradient, evaluate,
                       rayleigh_quotient, rayleigh_quotient_2d, truncated_eigenfunction,
                       validation_gap)
from .trideig import EigenPair, smallest_eigenvalues, sturm_count

__all__ = [
    "Arith", "BINARY64", "EXTENDED", "get_arith",
    "ShellConfig", "BisphericalFrame", "BisphericalPoint", "derive_frame",
    "TridiagonalMatrix", "assemble", "EigenPair", "smallest_eigenvalues", "sturm_count",
    "TruncatedEigenfunction", "truncated_eigenfunction", "evaluate", "eval_gradient",
    "boundary_normal_series", "rayleigh_quotient", "rayleigh_quotient_2d", "validation_gap",
    "ConvergenceReport", "ValidationReport", "SweepRecord", "SweepGrid", "SweepOptions",
    "converge_sigma", "validate_sigma", "concentric_exact", "eccentric_lower_bound", "sweep",
    "table1",
    "SteklovError", "GeometryError", "DegenerateFrameError", "TouchingBoundariesError",
    "EigenSolverError", "QuadratureError",
]
