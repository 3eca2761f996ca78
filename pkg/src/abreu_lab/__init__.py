"""Labelled convex polytopes, extremal affine functions and toric Einstein metrics."""
from .errors import *  # noqa: F401,F403
from .polytope import LabelledPolytope, HalfSpace, from_halfspaces, from_vertices, triangulate, facet_decomposition
from .measure import (
    AffineFunction, Polynomial2, moments, integrate_interior, integrate_facet, integrate_boundary,
    boundary_barycenter, psi_map, integrate_exp_weighted, exp_weighted_moments,
)
from .extremal import extremal_affine, barycenter_criterion
from .labelling import (
    monotone_point, cone_labels, einstein_normalize, preferred_point_formula, rationality,
    delzant_check, cone_angles,
)
from .soliton import soliton_vector, soliton_residual
from .potential import (
    guillemin, hirzebruch_closed_form, abreu_scalar, boundary_check, legendre_h, einstein_residual,
    PerturbedPotential,
)
from .mongeampere import SolverConfig, solve, compare
from . import generators

__version__ = "0.1.0"
