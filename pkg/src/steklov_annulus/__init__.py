"""Numerical laboratory for Steklov eigenvalues of planar domains with one hole.

Closed-form annulus spectrum, a P1 finite-element solver on transfinite
annular meshes, shape-derivative matrices for the double first eigenvalue,
and experiment runners reproducing the reference curve and tables.
"""

from .analytic import (CriticalRadius, critical_poly, find_eps0, normalized_first,
                       solve_coeffs, steklov_eig)
from .geometry import (AnnularDomain, BoundaryCurve, Circle, CosinePerturbedCircle,
                       GeometryError, PerturbationField)
from .fem import SteklovSpectrum, solve_domain
from .mesher import Mesh, build_annular_mesh
from .shape_deriv import (ShapeDerivMatrix, annulus_matrices, ball_matrix,
                          fd_branch_oracle)

__all__ = [
    "AnnularDomain", "BoundaryCurve", "Circle", "CosinePerturbedCircle",
    "CriticalRadius", "GeometryError", "Mesh", "PerturbationField",
    "ShapeDerivMatrix", "SteklovSpectrum", "annulus_matrices", "ball_matrix",
    "build_annular_mesh", "critical_poly", "fd_branch_oracle", "find_eps0",
    "normalized_first", "solve_coeffs", "solve_domain", "steklov_eig",
]

__version__ = "1.0.0"
