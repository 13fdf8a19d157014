"""Spectral pinching laboratory for hypersurfaces of the 3-sphere.

Build meshes of surfaces in S^3, compute their first Laplace eigenvalue,
curvature and center of gravity, and evaluate how close they are to a
geodesic sphere.
"""

__version__ = "0.1.0"

from .barycenter import center_of_gravity, gravity_energy, moment_residual
from .curvature import CurvatureField, analytic_curvature, curvature_for, discrete_curvature
from .mesh import (ImmersedMesh, make_clifford_torus, make_geodesic_sphere, make_perturbed_sphere,
                   position_fields, read_s4off, write_s4off)
from .operators import OperatorPair, assemble, integrate, lp_norm
from .pinching import PinchingReport, analyze
from .spectral import first_nonzero_eigenvalue, rayleigh_quotient

__all__ = [
    "ImmersedMesh", "make_geodesic_sphere", "make_clifford_torus", "make_perturbed_sphere",
    "position_fields", "read_s4off", "write_s4off",
    "OperatorPair", "assemble", "integrate", "lp_norm",
    "CurvatureField", "analytic_curvature", "discrete_curvature", "curvature_for",
    "first_nonzero_eigenvalue", "rayleigh_quotient",
    "center_of_gravity", "gravity_energy", "moment_residual",
    "PinchingReport", "analyze",
]
