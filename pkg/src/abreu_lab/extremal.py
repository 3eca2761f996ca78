"""Extremal affine function of a labelled polytope and the barycenter criterion."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import _exact
from .errors import IllConditioned
from .measure import AffineFunction, moments
from .polytope import LabelledPolytope

CONSTANCY_TOL = 1e-8
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class ExtremalResult:
    A: AffineFunction
    coefficients: np.ndarray
    condition_number: float
    is_constant: bool
    tol: float
    exact_coefficients: tuple | None = None


def extremal_affine(poly: LabelledPolytope, tol: float = CONSTANCY_TOL) -> ExtremalResult:
    """Solve W A = 2 Z for the coefficients of A in the basis 1, x_1, ..., x_n.

    A is constant when |(A_1..A_n)| * diam(P) <= tol * |A_0|.
    """
    md = moments(poly)
    cond = float(np.linalg.cond(md.W))
    if cond > CONDITION_LIMIT:
        warnings.warn(f"moment matrix condition number {cond:.3g} exceeds {CONDITION_LIMIT:g}", IllConditioned)
    exact = None
    if md.W_exact is not None:
        exact = tuple(_exact.solve(md.W_exact, [2 * z for z in md.Z_exact]))
        coeffs = np.array([float(v) for v in exact])
    else:
        coeffs = cho_solve(cho_factor(md.W), 2.0 * md.Z)
    lin = coeffs[1:]
    is_const = bool(np.linalg.norm(lin) * poly.diameter <= tol * abs(coeffs[0]))
    return ExtremalResult(AffineFunction.from_coefficients(coeffs), coeffs, cond, is_const, tol, exact)


@dataclass(frozen=True)
class BarycenterCriterion:
    bary_interior: np.ndarray
    bary_boundary: np.ndarray
    coincide: bool
    tol: float


def barycenter_criterion(poly: LabelledPolytope, tol: float = CONSTANCY_TOL) -> BarycenterCriterion:
    """Compare the centers of mass of (P, dx) and (dP, dsigma_nu)."""
    md = moments(poly)
    bp = md.W[1:, 0] / md.W[0, 0]
    bb = md.Z[1:] / md.Z[0]
    return BarycenterCriterion(bp, bb, bool(np.linalg.norm(bp - bb) <= tol * poly.diameter), tol)
