"""Soliton vector of a monotone labelled polytope.

The vector a is the unique minimiser of the strictly convex function
V(a) = int_P exp(2 <a, x - p>) dx, p the preferred point; at the minimum
the exp-weighted barycenter of P is p.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MaxIterations, NotMonotone
from .labelling import MonotoneCertificate, monotone_point
from .measure import exp_weighted_moments
from .polytope import LabelledPolytope


@dataclass(frozen=True)
class SolitonVector:
    a: np.ndarray
    residual: float
    iterations: int
    preferred_point: np.ndarray
    history: tuple = ()


def soliton_residual(poly: LabelledPolytope, p, a) -> float:
    """max_i |int_P exp(2<a, x - p>) (x_i - p_i) dx| / vol(P)."""
    _, m1, _ = exp_weighted_moments(poly, a, p)
    return float(np.abs(m1).max() / poly.volume)


def soliton_vector(poly: LabelledPolytope, certificate: MonotoneCertificate | None = None,
                   tol: float = 1e-10, max_iter: int = 50) -> SolitonVector:
    """Damped Newton on V starting from a = 0; stops when |grad V| <= tol * vol(P)."""
    cert = certificate or monotone_point(poly)
    if cert is None:
        raise NotMonotone("labelled polytope is not monotone")
    p = np.asarray(cert.preferred_point, dtype=float)
    vol = poly.volume
    a = np.zeros(poly.dim)
    history = []
    quad_tol = min(1e-12, tol)
    m0, m1, m2 = exp_weighted_moments(poly, a, p, tol=quad_tol)
    for it in range(max_iter + 1):
        grad = 2.0 * m1
        gnorm = float(np.linalg.norm(grad))
        history.append(gnorm / vol)
        if gnorm <= tol * vol:
            return SolitonVector(a, float(np.abs(m1).max() / vol), it, p, tuple(history))
        if it == max_iter:
            break
        hess = 4.0 * m2
        chol = np.linalg.cholesky(hess)  # raises if V lost strict convexity
        step = -np.linalg.solve(chol.T, np.linalg.solve(chol, grad))
        t, value = 1.0, m0
        while True:
            trial = a + t * step
            n0, n1, n2 = exp_weighted_moments(poly, trial, p, tol=quad_tol)
            if n0 <= value + 1e-4 * t * grad @ step or t < 1e-8:
                break
            t *= 0.5
        a, m0, m1, m2 = trial, n0, n1, n2
    raise MaxIterations(f"soliton Newton did not converge in {max_iter} iterations (|grad|/vol={history[-1]:.3g})")
