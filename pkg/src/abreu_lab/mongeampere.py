"""Least-squares collocation solver for the toric Kaehler-Einstein / Ricci-soliton equation in 2-D.

Unknown: u = u_o + f with f a Chebyshev expansion on the bounding box of P.
With labels rescaled so that the common value is 1/lam, the equation

    1/2 log det Hess u - lam h(x) - <a, x - p> = const,   h = <x - p, grad u> - u,

splits into a part singular at the boundary, which u_o solves exactly, and
the smooth residual

    r = G + 1/2 log det(I + H_o Hess f) - lam (<x - p, grad f> - f) - <a, x - p>,
    G = 1/2 log(det(Hess u_o) prod L_k) - lam/2 sum (L_k - 1/lam),

which is what the Gauss-Newton iteration drives to a constant.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from . import _exact
from .basis import ChebyshevBasis
from .errors import DomainMismatch, HessianNotPD, NoConvergence, NotMonotone
from .labelling import monotone_point
from .polytope import LabelledPolytope, facet_decomposition
from .potential import (
    PerturbedPotential,
    PotentialModel,
    guillemin_inverse_hessian,
    guillemin_regular_logdet,
    interior_grid,
)
from .soliton import soliton_vector

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    resolution: int = 32           # Chebyshev collocation nodes per axis
    degree: int | None = None      # total degree of f; default resolution // 2
    tol: float = 1e-8              # target max |r - mean r| on the collocation points
    max_iter: int = 40
    boundary_layer: float = 1e-3   # collocation points keep this distance (times diam) from dP
    min_step: float = 1e-6         # smallest line-search step before giving up
    armijo: float = 1e-4
    continuation_steps: int = 0    # 0: direct solve, with continuation as fallback
    fallback_steps: int = 8

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.resolution < 8:
            raise ValueError("resolution must be at least 8")
        if self.degree is not None and self.degree < 2:
            raise ValueError("degree must be at least 2")

    @property
    def basis_degree(self) -> int:
        return self.degree if self.degree is not None else self.resolution // 2


@dataclass(frozen=True)
class SolverResult:
    model: PerturbedPotential
    deviation: float
    iterations: int
    history: tuple
    a: np.ndarray
    lam: float
    polytope: LabelledPolytope     # P with labels rescaled to common value 1/lam
    preferred_point: np.ndarray
    collocation: np.ndarray = field(repr=False)
    check_deviation: float = float("nan")


def collocation_points(poly: LabelledPolytope, resolution: int, layer: float) -> np.ndarray:
    """Chebyshev tensor nodes inside P plus points graded towards every facet."""
    lo, hi = poly.vertices.min(axis=0), poly.vertices.max(axis=0)
    t = 0.5 - 0.5 * np.cos((np.arange(resolution) + 0.5) * np.pi / resolution)
    axes = [lo[i] + t * (hi[i] - lo[i]) for i in range(poly.dim)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, poly.dim)
    norms = np.linalg.norm(poly.normals, axis=1)
    gap = layer * poly.diameter
    pts = [grid]
    depths = gap * np.array([1.0, 4.0, 16.0, 64.0])
    for k in range(poly.n_facets):
        unit = poly.normals[k] / norms[k]
        for simp in facet_decomposition(poly, k):
            V = simp.vertices
            s = t[:, None]
            along = V[0] + s * (V[1] - V[0])
            pts.extend(along + d * unit for d in depths)
    X = np.concatenate(pts)
    dist = poly.defining(X) / norms
    return X[np.all(dist >= gap * (1 - 1e-9), axis=1)]


class _Problem:
    """Residual and Jacobian of the smooth equation at fixed collocation points."""

    def __init__(self, poly, basis, X, p, a, lam):
        self.X = X
        self.lam = lam
        self.p = p
        self.a = a
        self.Phi = basis.derivatives(X, 0)
        self.dPhi = basis.derivatives(X, 1)
        self.d2Phi = basis.derivatives(X, 2)
        self.Ho = guillemin_inverse_hessian(poly, X)
        L = poly.defining(X)
        self.G = 0.5 * guillemin_regular_logdet(poly, X) - 0.5 * lam * np.sum(L - 1.0 / lam, axis=1)
        self.drift = (X - p) @ a
        # <x - p, grad phi> - phi for each basis function
        self.hphi = np.einsum("mi,mbi->mb", X - p, self.dPhi) - self.Phi

    def evaluate(self, c, s=1.0, jacobian=True):
        F = np.einsum("mbij,b->mij", self.d2Phi, c)
        K = np.eye(2) + self.Ho @ F
        detK = K[:, 0, 0] * K[:, 1, 1] - K[:, 0, 1] * K[:, 1, 0]
        trK = K[:, 0, 0] + K[:, 1, 1]
        if np.any(detK <= 0) or np.any(trK <= 0):
            raise HessianNotPD("Hess u left the positive cone at a collocation point")
        r = 0.5 * np.log(detK) - self.lam * (self.hphi @ c) + s * (self.G - self.drift)
        if not jacobian:
            return r, None
        Hu = np.linalg.solve(K, self.Ho)  # (Hess u)^{-1}
        J = 0.5 * np.einsum("mij,mbij->mb", Hu, self.d2Phi) - self.lam * self.hphi
        return r, J


def _deviation(r):
    return float(np.abs(r - r.mean()).max())


def _gauss_newton(prob: _Problem, Z, c0, s, cfg: SolverConfig, history: list, final: bool):
    """Minimise |r_s(c) - kappa| over c = c0 + Z z. Returns the converged coefficients."""
    c = c0.copy()
    r, J = prob.evaluate(c, s)
    tol = cfg.tol if final else max(cfg.tol, 1e-6)
    stall = 0
    for it in range(cfg.max_iter):
        dev = _deviation(r)
        history.append((s, dev))
        if dev <= 0.25 * tol:
            return c, it
        A = np.hstack([J @ Z, -np.ones((len(r), 1))])
        rhs = -(r - r.mean())
        step, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        dc = Z @ step[:-1]
        obj = np.sum((r - r.mean()) ** 2)
        t = 1.0
        while True:
            try:
                r_new, _ = prob.evaluate(c + t * dc, s, jacobian=False)
                if np.sum((r_new - r_new.mean()) ** 2) <= (1 - cfg.armijo * t) * obj or t <= cfg.min_step:
                    break
            except HessianNotPD:
                if t <= cfg.min_step:
                    raise
            t *= 0.5
        c = c + t * dc
        r, J = prob.evaluate(c, s)
        new_dev = _deviation(r)
        stall = stall + 1 if new_dev > 0.9 * dev else 0
        if stall >= 4:
            history.append((s, new_dev))
            if new_dev <= tol or not final:
                return c, it + 1
            raise NoConvergence(f"Gauss-Newton stalled at deviation {new_dev:.3g} (s={s:g})")
    dev = _deviation(r)
    history.append((s, dev))
    if dev <= tol or not final:
        return c, cfg.max_iter
    raise NoConvergence(f"no convergence in {cfg.max_iter} iterations (deviation {dev:.3g}, s={s:g})")


def _rescaled(poly: LabelledPolytope, lam, cert) -> LabelledPolytope:
    if cert.exact_value is not None and _exact.is_exact(lam):
        return poly.relabel([1 / (Fraction(lam) * cert.exact_value)] * poly.n_facets)
    return poly.relabel([1.0 / (float(lam) * cert.common_value)] * poly.n_facets)


def solve(poly: LabelledPolytope, lam=1, a=None, config: SolverConfig | None = None,
          initial=None) -> SolverResult:
    """Solve for u = u_o + f on the labels of ``poly`` rescaled to common value 1/lam.

    f is gauge-fixed by f(p) = 0, grad f(p) = 0 at the preferred point p. When
    ``a`` is omitted the soliton vector is computed first. ``initial`` is an
    optional coefficient vector for f (any affine part is projected away).
    """
    cfg = config or SolverConfig()
    if poly.dim != 2:
        raise ValueError("the solver is implemented for n = 2")
    cert = monotone_point(poly)
    if cert is None:
        raise NotMonotone("labelled polytope is not monotone")
    P = _rescaled(poly, lam, cert)
    p = cert.preferred_point
    if a is None:
        a = soliton_vector(P, cert).a
    a = np.asarray(a, dtype=float)
    lo, hi = P.vertices.min(axis=0), P.vertices.max(axis=0)
    basis = ChebyshevBasis(tuple(lo), tuple(hi), cfg.basis_degree)
    X = collocation_points(P, cfg.resolution, cfg.boundary_layer)
    if len(X) < 2 * basis.size:
        log.warning("only %d collocation points for %d unknowns", len(X), basis.size)
    prob = _Problem(P, basis, X, p, a, float(lam))
    gauge = np.vstack([basis.derivatives(p[None], 0)[0], basis.derivatives(p[None], 1)[0].T])
    Z = null_space(gauge)
    c0 = np.zeros(basis.size)
    if initial is not None:
        # subtract the affine function matching f(p), grad f(p); it lives on T_0 and T_1 only
        c0 = np.array(initial, dtype=float)
        idx = [tuple(i) for i in basis.indices]
        aff = [idx.index(k) for k in ((0, 0), (1, 0), (0, 1))]
        c0[aff] -= np.linalg.solve(gauge[:, aff], gauge @ c0)

    history: list = []
    iterations = 0

    def continuation(steps, c):
        nonlocal iterations
        for s in np.linspace(0.0, 1.0, steps + 1)[1:]:
            c, it = _gauss_newton(prob, Z, c, float(s), cfg, history, final=s == 1.0)
            iterations += it
        return c

    if cfg.continuation_steps:
        c = continuation(cfg.continuation_steps, np.zeros(basis.size))
    else:
        try:
            c, iterations = _gauss_newton(prob, Z, c0, 1.0, cfg, history, final=True)
        except (HessianNotPD, NoConvergence) as exc:
            log.info("direct solve failed (%s); switching to continuation", exc)
            c = continuation(cfg.fallback_steps, np.zeros(basis.size))
    r, _ = prob.evaluate(c, 1.0, jacobian=False)
    dev = _deviation(r)
    model = PerturbedPotential(P, basis, c)
    check = _check_deviation(model, P, p, a, float(lam), cfg.boundary_layer)
    return SolverResult(model, dev, iterations, tuple(history), a, float(lam), P, p, X, check)


def _check_deviation(model, P, p, a, lam, layer) -> float:
    """Residual deviation on an independent grid (not the collocation points)."""
    norms = np.linalg.norm(P.normals, axis=1)
    X = interior_grid(P, 40)
    X = X[np.all(P.defining(X) / norms >= layer * P.diameter, axis=1)]
    prob = _Problem(P, model.basis, X, p, a, lam)
    try:
        r, _ = prob.evaluate(model.coeffs, 1.0, jacobian=False)
    except HessianNotPD:
        return float("inf")
    return _deviation(r)


# -- comparison ------------------------------------------------------------------

@dataclass(frozen=True)
class Comparison:
    h_max: float      # max relative Frobenius difference of H
    h_mean: float
    u_gauge: float    # min over affine g of max |u_A - u_B - g|
    n_points: int
    delta: float


def compare(A: PotentialModel, B: PotentialModel, grid=None, delta: float = 0.05, m: int = 50) -> Comparison:
    """Compare two potentials on grid points where every defining function of A is >= delta."""
    PA, PB = A.polytope, B.polytope
    if (PA.dim != PB.dim or len(PA.vertices) != len(PB.vertices)
            or not np.allclose(PA.vertices, PB.vertices, atol=1e-9 * max(PA.diameter, 1.0))):
        raise DomainMismatch("potentials live on different polytopes")
    X = interior_grid(PA, m, delta) if grid is None else np.atleast_2d(np.asarray(grid, dtype=float))
    if grid is not None:
        X = X[np.all(PA.defining(X) >= delta, axis=1)]
    HA, HB = A.inverse_hessian(X), B.inverse_hessian(X)
    rel = np.linalg.norm(HA - HB, axis=(1, 2)) / np.linalg.norm(HB, axis=(1, 2))
    du = A.value(X) - B.value(X)
    return Comparison(float(rel.max()), float(rel.mean()), _affine_minimax(X, du), len(X), delta)


def _affine_minimax(X, du) -> float:
    """min over affine g of max |du - g| (an LP, solved after removing the least-squares fit
    and rescaling so that the LP feasibility tolerance is relative)."""
    ones = np.ones((len(X), 1))
    M = np.hstack([ones, X])
    e = du - M @ np.linalg.lstsq(M, du, rcond=None)[0]
    scale = float(np.abs(e).max())
    if scale == 0.0:
        return 0.0
    e = e / scale
    A_ub = np.vstack([np.hstack([M, -ones]), np.hstack([-M, -ones])])
    b_ub = np.concatenate([e, -e])
    cost = np.zeros(M.shape[1] + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * M.shape[1] + [(0, None)], method="highs")
    g = res.x[:-1]
    return scale * float(np.abs(e - M @ g).max())
