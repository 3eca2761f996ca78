"""Symplectic potentials on labelled polytopes and the quantities built from them.

Every model evaluates at a batch of points ``x`` of shape (m, n) (or a single
point of shape (n,)); derivative tensors are indexed so that
``dH[..., i, j, k] = d_k H_ij`` and ``d2H[..., i, j, k, l] = d_k d_l H_ij``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import ChebyshevBasis
from .errors import HessianNotPD, NotMonotone, OutsideDomain, PointOnBoundary
from .generators import hirzebruch
from .labelling import monotone_point
from .polytope import LabelledPolytope, facet_decomposition


def _batch(x):
    x = np.asarray(x, dtype=float)
    return np.atleast_2d(x), x.ndim == 1


def _unbatch(v, single):
    return v[0] if single else v


class PotentialModel:
    """Base class: subclasses supply value, gradient and hessian on the open polytope.

    Analytic third and fourth derivatives (or analytic derivatives of H) are
    optional; without them abreu_scalar falls back to finite differences.
    """

    polytope: LabelledPolytope

    @property
    def dim(self) -> int:
        return self.polytope.dim

    @property
    def analytic(self) -> bool:
        return type(self).third_derivatives is not PotentialModel.third_derivatives

    def check_domain(self, x):
        X, _ = _batch(x)
        vals = self.polytope.defining(X) / np.linalg.norm(self.polytope.normals, axis=1)
        tol = self.polytope.tol
        if np.any(vals < -tol):
            raise OutsideDomain("point outside the polytope")
        if np.any(vals <= tol):
            raise PointOnBoundary("point on the boundary; derivatives of u are singular there")

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def hessian(self, x):
        raise NotImplementedError

    def third_derivatives(self, x):
        raise NotImplementedError

    def fourth_derivatives(self, x):
        raise NotImplementedError

    def inverse_hessian(self, x):
        return np.linalg.inv(self.hessian(x))

    def inverse_hessian_derivatives(self, x):
        """(H, dH, d2H) from the derivatives of Hess u."""
        X, single = _batch(x)
        H = np.linalg.inv(self.hessian(X))
        D3 = self.third_derivatives(X)
        D4 = self.fourth_derivatives(X)
        # M_k = H (d_k G) H, with G = Hess u
        M = np.einsum("mia,mabk,mbj->mijk", H, D3, H)
        dH = -M
        HD = np.einsum("mia,mabk->mibk", H, D3)  # H d_k G
        d2H = (
            np.einsum("miak,majl->mijkl", HD, M)
            + np.einsum("mial,majk->mijkl", HD, M)
            - np.einsum("mia,mabkl,mbj->mijkl", H, D4, H)
        )
        return tuple(_unbatch(v, single) for v in (H, dH, d2H))


class GuilleminPotential(PotentialModel):
    """u_o = 1/2 sum_k L_k log L_k."""

    def __init__(self, polytope: LabelledPolytope):
        self.polytope = polytope

    def _L(self, x):
        X, single = _batch(x)
        self.check_domain(X)
        return X, single, self.polytope.defining(X)

    def value(self, x):
        _, single, L = self._L(x)
        return _unbatch(0.5 * np.sum(L * np.log(L), axis=-1), single)

    def gradient(self, x):
        _, single, L = self._L(x)
        return _unbatch(0.5 * (np.log(L) + 1.0) @ self.polytope.normals, single)

    def hessian(self, x):
        _, single, L = self._L(x)
        N = self.polytope.normals
        return _unbatch(0.5 * np.einsum("mk,ki,kj->mij", 1.0 / L, N, N), single)

    def third_derivatives(self, x):
        _, single, L = self._L(x)
        N = self.polytope.normals
        return _unbatch(-0.5 * np.einsum("mk,ki,kj,kl->mijl", L ** -2, N, N, N), single)

    def fourth_derivatives(self, x):
        _, single, L = self._L(x)
        N = self.polytope.normals
        return _unbatch(np.einsum("mk,ki,kj,kl,kq->mijlq", L ** -3, N, N, N, N), single)

    def inverse_hessian(self, x):
        X, single, _ = self._L(x)
        return _unbatch(guillemin_inverse_hessian(self.polytope, X), single)

    def inverse_hessian_derivatives(self, x):
        X, single, _ = self._L(x)
        return tuple(_unbatch(v, single) for v in guillemin_inverse_hessian(self.polytope, X, order=2))


def _product(L, N, R):
    """Value, gradient and Hessian of prod_{j in R} L_j at every point."""
    m, n = L.shape[0], N.shape[1]
    R = list(R)
    P = np.prod(L[:, R], axis=1) if R else np.ones(m)
    dP = np.zeros((m, n))
    d2P = np.zeros((m, n, n))
    for a, j in enumerate(R):
        rest = R[:a] + R[a + 1:]
        dP += np.prod(L[:, rest], axis=1)[:, None] * N[j]
        for b, i in enumerate(rest):
            rest2 = [t for t in rest if t != i]
            d2P += np.prod(L[:, rest2], axis=1)[:, None, None] * np.outer(N[j], N[i])
    return P, dP, d2P


def _cross(rows: np.ndarray) -> np.ndarray:
    """Generalised cross product of n-1 vectors in R^n (signed maximal minors)."""
    n = rows.shape[1]
    return np.array([(-1) ** i * np.linalg.det(np.delete(rows, i, axis=1)) if n > 1 else 1.0
                     for i in range(n)])


@lru_cache(maxsize=64)
def _guillemin_structure(N_bytes: bytes, d: int, n: int):
    N = np.frombuffer(N_bytes).reshape(d, n)
    num = []
    for T in itertools.combinations(range(d), n - 1):
        c = _cross(N[list(T)]) if n > 1 else np.ones(1)
        if np.any(c):
            num.append(([j for j in range(d) if j not in T], 2.0 ** -(n - 1) * np.outer(c, c)))
    den = []
    for S in itertools.combinations(range(d), n):
        w = np.linalg.det(N[list(S)]) ** 2
        if w > 0:
            den.append(([j for j in range(d) if j not in S], 2.0 ** -n * w))
    return num, den


def guillemin_inverse_hessian(poly: LabelledPolytope, X: np.ndarray, order: int = 0):
    """H = (Hess u_o)^{-1} = adj / det, both written as positive sums of products of the L_j
    (Cauchy-Binet), so H and its derivatives stay accurate up to the boundary.

    Returns H, and also dH, d2H when ``order`` is 2.
    """
    N = np.ascontiguousarray(poly.normals)
    d, n = N.shape
    num, den = _guillemin_structure(N.tobytes(), d, n)
    L = poly.defining(X)
    m = len(X)
    A = np.zeros((m, n, n))
    dA = np.zeros((m, n, n, n))
    d2A = np.zeros((m, n, n, n, n))
    D = np.zeros(m)
    dD = np.zeros((m, n))
    d2D = np.zeros((m, n, n))
    for R, M in num:
        P, dP, d2P = _product(L, N, R)
        A += P[:, None, None] * M
        if order:
            dA += np.einsum("ij,mk->mijk", M, dP)
            d2A += np.einsum("ij,mkl->mijkl", M, d2P)
    for R, w in den:
        P, dP, d2P = _product(L, N, R)
        D += w * P
        dD += w * dP
        d2D += w * d2P
    H = A / D[:, None, None]
    if not order:
        return H
    Dk = D[:, None, None, None]
    dH = (dA - np.einsum("mij,mk->mijk", H, dD)) / Dk
    d2H = (
        d2A
        - np.einsum("mijl,mk->mijkl", dH, dD)
        - np.einsum("mijk,ml->mijkl", dH, dD)
        - np.einsum("mij,mkl->mijkl", H, d2D)
    ) / Dk[..., None]
    return H, dH, d2H


def guillemin_regular_logdet(poly: LabelledPolytope, X: np.ndarray) -> np.ndarray:
    """log(det(Hess u_o) * prod_k L_k), smooth up to the boundary."""
    N = np.ascontiguousarray(poly.normals)
    d, n = N.shape
    _, den = _guillemin_structure(N.tobytes(), d, n)
    L = poly.defining(X)
    D = sum(w * np.prod(L[:, R], axis=1) for R, w in den)
    return np.log(D)


def guillemin(polytope: LabelledPolytope) -> GuilleminPotential:
    return GuilleminPotential(polytope)


class HirzebruchPotential(PotentialModel):
    """Closed-form extremal potential on the trapezoid (1,0), (1,1), (2,2), (2,0) with labels nu(C).

    For C = 1, H = (A(x1)/x1) v v^T + x1 B(y) e2 e2^T with y = x2/x1, v = (1, y),
    A(x) = -(2/7)(x-1)(x-2)(3x+2), B(y) = 2y(1-y); for general C, H scales by 1/C.
    """

    def __init__(self, C=1):
        if C <= 0:
            raise ValueError("C must be positive")
        self.C = C
        self.polytope = hirzebruch(C)
        self._s = 1.0 / float(C)

    @property
    def analytic(self) -> bool:
        return True

    def _X(self, x):
        X, single = _batch(x)
        self.check_domain(X)
        return X[:, 0], X[:, 1], single

    def value(self, x):
        x1, x2, single = self._X(x)
        F = 0.7 * (x1 - 1) * np.log(x1 - 1) + 0.875 * (2 - x1) * np.log(2 - x1) \
            + 0.175 * (x1 + 2 / 3) * np.log(x1 + 2 / 3)
        g = 0.5 * (x2 * np.log(x2) + (x1 - x2) * np.log(x1 - x2) - x1 * np.log(x1))
        return _unbatch((F + g) / self._s, single)

    def gradient(self, x):
        x1, x2, single = self._X(x)
        dF = 0.7 * (np.log(x1 - 1) + 1) - 0.875 * (np.log(2 - x1) + 1) + 0.175 * (np.log(x1 + 2 / 3) + 1)
        g1 = dF + 0.5 * np.log((x1 - x2) / x1)
        g2 = 0.5 * np.log(x2 / (x1 - x2))
        return _unbatch(np.stack([g1, g2], axis=-1) / self._s, single)

    def hessian(self, x):
        x1, x2, single = self._X(x)
        d2F = 0.7 / (x1 - 1) + 0.875 / (2 - x1) + 0.175 / (x1 + 2 / 3)
        u11 = d2F + 0.5 * (1 / (x1 - x2) - 1 / x1)
        u12 = -0.5 / (x1 - x2)
        u22 = 0.5 * (1 / x2 + 1 / (x1 - x2))
        G = np.stack([np.stack([u11, u12], -1), np.stack([u12, u22], -1)], -2)
        return _unbatch(G / self._s, single)

    def inverse_hessian(self, x):
        return self.inverse_hessian_derivatives(x)[0]

    def inverse_hessian_derivatives(self, x):
        x1, x2, single = self._X(x)
        a, b = 6 / 7, 8 / 7
        m = x1.size
        H = np.empty((m, 2, 2))
        dH = np.zeros((m, 2, 2, 2))
        d2H = np.zeros((m, 2, 2, 2, 2))
        H[:, 0, 0] = -a * x1 ** 2 + 2 * x1 - b / x1
        H[:, 0, 1] = -a * x1 * x2 + 2 * x2 - b * x2 / x1 ** 2
        H[:, 1, 1] = -a * x2 ** 2 + 2 * x2 - b * x2 ** 2 / x1 ** 3
        dH[:, 0, 0, 0] = -2 * a * x1 + 2 + b / x1 ** 2
        dH[:, 0, 1, 0] = -a * x2 + 2 * b * x2 / x1 ** 3
        dH[:, 0, 1, 1] = -a * x1 + 2 - b / x1 ** 2
        dH[:, 1, 1, 0] = 3 * b * x2 ** 2 / x1 ** 4
        dH[:, 1, 1, 1] = -2 * a * x2 + 2 - 2 * b * x2 / x1 ** 3
        d2H[:, 0, 0, 0, 0] = -2 * a - 2 * b / x1 ** 3
        d2H[:, 0, 1, 0, 0] = -6 * b * x2 / x1 ** 4
        d2H[:, 0, 1, 0, 1] = d2H[:, 0, 1, 1, 0] = -a + 2 * b / x1 ** 3
        d2H[:, 1, 1, 0, 0] = -12 * b * x2 ** 2 / x1 ** 5
        d2H[:, 1, 1, 0, 1] = d2H[:, 1, 1, 1, 0] = 6 * b * x2 / x1 ** 4
        d2H[:, 1, 1, 1, 1] = -2 * a - 2 * b / x1 ** 3
        H[:, 1, 0] = H[:, 0, 1]
        dH[:, 1, 0] = dH[:, 0, 1]
        d2H[:, 1, 0] = d2H[:, 0, 1]
        return tuple(_unbatch(v * self._s, single) for v in (H, dH, d2H))


def hirzebruch_closed_form(C=1) -> HirzebruchPotential:
    return HirzebruchPotential(C)


class PerturbedPotential(PotentialModel):
    """u = u_o + f with f = sum_m coeffs[m] phi_m in a Chebyshev basis on a box containing P."""

    def __init__(self, polytope: LabelledPolytope, basis: ChebyshevBasis, coeffs):
        self.polytope = polytope
        self.basis = basis
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.base = GuilleminPotential(polytope)

    def correction(self, x, order: int = 0):
        """Derivative tensor of f of the given order."""
        X, single = _batch(x)
        D = np.tensordot(self.basis.derivatives(X, order), self.coeffs, axes=([1], [0]))
        return _unbatch(D, single)

    def _sum(self, x, order, base):
        X, single = _batch(x)
        return _unbatch(base(X) + self.correction(X, order), single)

    def value(self, x):
        return self._sum(x, 0, self.base.value)

    def gradient(self, x):
        return self._sum(x, 1, self.base.gradient)

    def hessian(self, x):
        return self._sum(x, 2, self.base.hessian)

    def third_derivatives(self, x):
        return self._sum(x, 3, self.base.third_derivatives)

    def fourth_derivatives(self, x):
        return self._sum(x, 4, self.base.fourth_derivatives)

    def inverse_hessian(self, x):
        return self.inverse_hessian_derivatives(x)[0]

    def inverse_hessian_derivatives(self, x):
        """H = K^{-1} H_o with K = I + H_o Hess f; every factor is smooth up to dP."""
        X, single = _batch(x)
        self.check_domain(X)
        n = self.dim
        Ho, dHo, d2Ho = guillemin_inverse_hessian(self.polytope, X, order=2)
        F, dF, d2F = (self.correction(X, k) for k in (2, 3, 4))
        # derivative index first: A[k] = d_k of the matrix field
        dHo, dF = np.moveaxis(dHo, -1, 0), np.moveaxis(dF, -1, 0)
        d2Ho, d2F = np.moveaxis(d2Ho, (-2, -1), (0, 1)), np.moveaxis(d2F, (-2, -1), (0, 1))
        M = np.linalg.inv(np.eye(n) + Ho @ F)
        dK = dHo @ F + Ho @ dF
        dM = -M @ dK @ M
        H = M @ Ho
        dH = dM @ Ho + M @ dHo
        d2H = np.empty((n, n) + H.shape)
        for k in range(n):
            for l in range(k, n):
                d2K = d2Ho[k, l] @ F + dHo[k] @ dF[l] + dHo[l] @ dF[k] + Ho @ d2F[k, l]
                d2M = -dM[l] @ dK[k] @ M - M @ d2K @ M - M @ dK[k] @ dM[l]
                d2H[k, l] = d2H[l, k] = d2M @ Ho + dM[k] @ dHo[l] + dM[l] @ dHo[k] + M @ d2Ho[k, l]
        dH = np.moveaxis(dH, 0, -1)
        d2H = np.moveaxis(d2H, (0, 1), (-2, -1))
        return tuple(_unbatch(v, single) for v in (H, dH, d2H))


# -- derived quantities ---------------------------------------------------------

def _fd_abreu(model: PotentialModel, X: np.ndarray) -> np.ndarray:
    n = model.dim
    h0 = 1e-4 * model.polytope.diameter
    E = np.eye(n)

    def second(h):
        out = np.zeros(len(X))
        for i in range(n):
            for j in range(n):
                if i == j:
                    Hp = model.inverse_hessian(X + h * E[i])[:, i, i]
                    Hm = model.inverse_hessian(X - h * E[i])[:, i, i]
                    H0 = model.inverse_hessian(X)[:, i, i]
                    out += (Hp - 2 * H0 + Hm) / h ** 2
                else:
                    f = lambda si, sj: model.inverse_hessian(X + si * h * E[i] + sj * h * E[j])[:, i, j]
                    out += (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4 * h ** 2)
        return out

    return -(4.0 * second(h0 / 2) - second(h0)) / 3.0


def abreu_scalar(model: PotentialModel, x):
    """S = -sum_ij d_i d_j H_ij."""
    X, single = _batch(x)
    model.check_domain(X)
    if model.analytic:
        _, _, d2H = model.inverse_hessian_derivatives(X)
        S = -np.einsum("mijij->m", d2H)
    else:
        S = _fd_abreu(model, X)
    return _unbatch(S, single)


def legendre_h(model: PotentialModel, x, origin=None):
    """h(x) = <x - origin, grad u(x)> - u(x)."""
    X, single = _batch(x)
    o = np.zeros(model.dim) if origin is None else np.asarray(origin, dtype=float)
    h = np.einsum("mi,mi->m", X - o, model.gradient(X)) - model.value(X)
    return _unbatch(h, single)


def ricci_potential(model: PotentialModel, x):
    """1/2 log det Hess u."""
    X, single = _batch(x)
    sign, logdet = np.linalg.slogdet(model.hessian(X))
    if np.any(sign <= 0):
        raise HessianNotPD("Hessian of u is not positive definite")
    return _unbatch(0.5 * logdet, single)


def interior_grid(poly: LabelledPolytope, m: int = 50, delta: float = 0.0) -> np.ndarray:
    """Cell-centred m^n tensor grid on the bounding box, restricted to {L_k > delta for all k}."""
    lo, hi = poly.vertices.min(axis=0), poly.vertices.max(axis=0)
    axes = [lo[i] + (np.arange(m) + 0.5) / m * (hi[i] - lo[i]) for i in range(poly.dim)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, poly.dim)
    L = poly.defining(pts)
    keep = np.all(L > delta, axis=1) if delta > 0 else np.all(
        L / np.linalg.norm(poly.normals, axis=1) > poly.tol, axis=1)
    return pts[keep]


@dataclass(frozen=True)
class ResidualField:
    points: np.ndarray
    values: np.ndarray
    deviation: float
    lam: float
    a: np.ndarray
    preferred_point: np.ndarray
    common_value: float


def einstein_residual(model: PotentialModel, poly: LabelledPolytope | None = None, lam: float = 1.0,
                      a=None, grid=None) -> ResidualField:
    """r = 1/2 log det Hess u - lam h - <a, x> with the preferred point at the origin
    and labels rescaled to common value 1; deviation = max |r - mean r|.

    Rescaling the labels by 1/c multiplies u by 1/c, so in the caller's labels
    the coefficient of h becomes lam / c.
    """
    poly = poly or model.polytope
    cert = monotone_point(poly)
    if cert is None:
        raise NotMonotone("labelled polytope is not monotone")
    p, c = cert.preferred_point, cert.common_value
    X = interior_grid(poly, 50) if grid is None else np.atleast_2d(np.asarray(grid, dtype=float))
    a = np.zeros(poly.dim) if a is None else np.asarray(a, dtype=float)
    r = ricci_potential(model, X) - (lam / c) * legendre_h(model, X, origin=p) - (X - p) @ a
    return ResidualField(X, r, float(np.abs(r - r.mean()).max()), lam, a, p, c)


# -- boundary conditions ----------------------------------------------------------

@dataclass(frozen=True)
class BoundarySample:
    facet: int
    point: np.ndarray
    kernel_defect: float      # |H nu_k|
    derivative_defect: float  # |dH(nu_k, nu_k) - 2 nu_k|
    tangent_min_eig: float
    ok: bool


@dataclass(frozen=True)
class BoundaryReport:
    samples: tuple
    tol: float

    @property
    def passed(self) -> bool:
        return all(s.ok for s in self.samples)

    @property
    def violations(self) -> tuple:
        return tuple(s for s in self.samples if not s.ok)


def _facet_points(poly: LabelledPolytope, k: int, samples: int) -> list[np.ndarray]:
    """Points spread over the relative interior of facet k."""
    pieces = facet_decomposition(poly, k)
    if poly.dim == 2:
        (V,) = [s.vertices for s in pieces]
        return [V[0] + t * (V[1] - V[0]) for t in (np.arange(samples) + 1) / (samples + 1)]
    # vertex centroid and midpoints towards the facet's vertices; fan slivers would hug edges
    V = np.unique(np.concatenate([s.vertices for s in pieces]), axis=0)
    c = V.mean(axis=0)
    out = [c] + [0.5 * (c + v) for v in V]
    return out[:samples]


def _extrapolate(ts, vals):
    """Value at t = 0 of the interpolating polynomial through (ts, vals)."""
    w = np.array([np.prod([-ti / (tj - ti) for ti in ts if ti != tj]) for tj in ts])
    return np.tensordot(w, np.asarray(vals), axes=1)


def boundary_check(model: PotentialModel, poly: LabelledPolytope | None = None, samples: int = 5,
                   tol: float = 1e-6) -> BoundaryReport:
    """Audit H(nu_k, .) = 0, dH(nu_k, nu_k) = 2 nu_k and tangential positivity on each facet.

    Boundary values are cubic extrapolations along the inward normal from
    distances 1e-2 .. 1e-5 times the local scale (distance of the sample to
    the other facets, at most the diameter).
    """
    poly = poly or model.polytope
    n = poly.dim
    powers = 10.0 ** -np.arange(2, 6)
    norms = np.linalg.norm(poly.normals, axis=1)
    out = []
    for k in range(poly.n_facets):
        nu = poly.normals[k]
        unit = nu / np.linalg.norm(nu)
        Q = np.linalg.svd(unit[None, :])[2][1:].T  # orthonormal basis of nu^perp
        for y in _facet_points(poly, k, samples):
            # local scale: distance from y to the other facets, capped by the diameter
            dist = np.delete(poly.defining(y) / norms, k)
            ts = min(poly.diameter, float(dist.min())) * powers
            X = y[None, :] + ts[:, None] * unit[None, :]
            H, dH, _ = model.inverse_hessian_derivatives(X)
            H0 = _extrapolate(ts, H)
            dH0 = _extrapolate(ts, dH)
            kern = float(np.linalg.norm(H0 @ nu))
            deriv = float(np.linalg.norm(np.einsum("i,j,ijk->k", nu, nu, dH0) - 2 * nu))
            tang = float(np.linalg.eigvalsh(Q.T @ H0 @ Q).min()) if n > 1 else np.inf
            ok = kern <= tol and deriv <= tol and tang > tol
            out.append(BoundarySample(k, y, kern, deriv, tang, ok))
    return BoundaryReport(tuple(out), tol)


__all__ = [
    "PotentialModel", "GuilleminPotential", "HirzebruchPotential", "PerturbedPotential",
    "guillemin", "hirzebruch_closed_form", "guillemin_inverse_hessian", "guillemin_regular_logdet",
    "abreu_scalar", "legendre_h", "ricci_potential", "interior_grid",
    "einstein_residual", "ResidualField", "boundary_check", "BoundaryReport", "BoundarySample",
]
