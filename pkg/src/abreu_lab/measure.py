"""Integration over a labelled polytope and its boundary.

Interior integrals use Lebesgue measure of the input coordinates.  On facet
``F_k`` the boundary measure is Euclidean surface measure divided by
``|normal_k|``, so doubling a label halves the facet's mass.  Polynomials of
degree <= 2 are integrated in closed form on the fan triangulation (exactly,
in Fractions, when the polytope is exact).  Exponentially weighted integrals
use a collapsed Gauss-Legendre rule with dyadic refinement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _exact
from .errors import QuadratureNotConverged
from .polytope import LabelledPolytope, _check_index, facet_decomposition, triangulate


@dataclass(frozen=True)
class AffineFunction:
    """x -> constant + <linear, x>."""

    constant: float
    linear: tuple

    def __post_init__(self):
        object.__setattr__(self, "linear", tuple(self.linear))

    @property
    def dim(self) -> int:
        return len(self.linear)

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ np.asarray(self.linear, dtype=float) + float(self.constant)

    def as_polynomial(self) -> "Polynomial2":
        n = self.dim
        return Polynomial2(self.constant, self.linear, tuple((0,) * n for _ in range(n)))

    @classmethod
    def from_coefficients(cls, coeffs) -> "AffineFunction":
        """From ``(A_0, A_1, ..., A_n)`` in the basis ``1, x_1, ..., x_n``."""
        coeffs = list(coeffs)
        return cls(coeffs[0], tuple(coeffs[1:]))


@dataclass(frozen=True)
class Polynomial2:
    """c + <b, x> + x^T Q x with Q symmetric."""

    constant: object
    linear: tuple
    quadratic: tuple

    def __post_init__(self):
        object.__setattr__(self, "linear", tuple(self.linear))
        object.__setattr__(self, "quadratic", tuple(tuple(r) for r in self.quadratic))

    @classmethod
    def monomial(cls, n: int, i: int = 0, j: int = 0) -> "Polynomial2":
        """x_i x_j with the convention x_0 = 1."""
        b = [0] * n
        Q = [[0] * n for _ in range(n)]
        if i == 0 and j == 0:
            return cls(1, b, Q)
        if i == 0 or j == 0:
            b[max(i, j) - 1] = 1
            return cls(0, b, Q)
        Q[i - 1][j - 1] += Fraction(1, 2)
        Q[j - 1][i - 1] += Fraction(1, 2)
        return cls(0, b, Q)

    @classmethod
    def zero(cls, n: int) -> "Polynomial2":
        return cls(0, [0] * n, [[0] * n for _ in range(n)])

    @property
    def dim(self) -> int:
        return len(self.linear)

    @property
    def is_exact(self) -> bool:
        vals = [self.constant, *self.linear, *(v for r in self.quadratic for v in r)]
        return all(_exact.is_exact(v) for v in vals)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        Q = np.asarray(self.quadratic, dtype=float)
        return float(self.constant) + x @ np.asarray(self.linear, dtype=float) + np.einsum(
            "...i,ij,...j->...", x, Q, x
        )


@dataclass(frozen=True)
class MomentData:
    """W_ij = int_P x_i x_j and Z_i = int_dP x_i dsigma (x_0 = 1), floats plus exact copies."""

    W: np.ndarray
    Z: np.ndarray
    W_exact: tuple | None = None
    Z_exact: tuple | None = None


# -- closed-form simplex integrals -------------------------------------------

def _simplex_poly_integral(V, measure, g: Polynomial2):
    """int over the simplex with vertex rows V of g, where ``measure`` is its mass."""
    m = len(V) - 1
    n = len(V[0])
    s = [sum(v[i] for v in V) for i in range(n)]
    total = g.constant * measure
    total += sum(g.linear[i] * s[i] for i in range(n)) * measure / (m + 1)
    second = 0
    for i in range(n):
        for j in range(n):
            q = g.quadratic[i][j]
            if q:
                second += q * (sum(v[i] * v[j] for v in V) + s[i] * s[j])
    return total + second * measure / ((m + 1) * (m + 2))


def _simplex_volume(V, exact: bool):
    n = len(V) - 1
    E = [[a - b for a, b in zip(v, V[0])] for v in V[1:]]
    if exact:
        return abs(_exact.det(E)) / math.factorial(n)
    return abs(float(np.linalg.det(np.asarray(E, dtype=float)))) / math.factorial(n)


def _facet_measure(V, normal, exact: bool):
    """dsigma-mass of an (n-1)-simplex lying in the hyperplane orthogonal to ``normal``."""
    n = len(normal)
    E = [[a - b for a, b in zip(v, V[0])] for v in V[1:]] + [list(normal)]
    nn = sum(v * v for v in normal)
    if exact:
        return abs(_exact.det(E)) / (nn * math.factorial(n - 1))
    return abs(float(np.linalg.det(np.asarray(E, dtype=float)))) / (float(nn) * math.factorial(n - 1))


def _use_exact(poly: LabelledPolytope, *objs) -> bool:
    return poly.is_exact and all(h.is_exact for h in poly.halfspaces) and all(o.is_exact for o in objs)


def _points(poly: LabelledPolytope, indices, exact: bool):
    if exact:
        return [poly.exact_vertices[i] for i in indices]
    return [tuple(float(t) for t in poly.vertices[i]) for i in indices]


def integrate_interior(poly: LabelledPolytope, g: Polynomial2):
    """int_P g dx for a polynomial of degree <= 2 (Fraction when exact)."""
    exact = _use_exact(poly, g)
    total = Fraction(0) if exact else 0.0
    for simp in triangulate(poly):
        V = _points(poly, simp.indices, exact)
        total += _simplex_poly_integral(V, _simplex_volume(V, exact), g)
    return total


def integrate_facet(poly: LabelledPolytope, k: int, g: Polynomial2):
    """int_{F_k} g dsigma_nu, facet index 0-based."""
    _check_index(poly, k)
    exact = _use_exact(poly, g)
    normal = poly.halfspaces[k].normal if exact else tuple(float(v) for v in poly.normals[k])
    total = Fraction(0) if exact else 0.0
    for simp in facet_decomposition(poly, k):
        V = _points(poly, simp.indices, exact)
        total += _simplex_poly_integral(V, _facet_measure(V, normal, exact), g)
    return total


def integrate_boundary(poly: LabelledPolytope, g: Polynomial2):
    return sum(integrate_facet(poly, k, g) for k in range(poly.n_facets))


def moments(poly: LabelledPolytope) -> MomentData:
    n = poly.dim
    W = [[None] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        for j in range(i, n + 1):
            W[i][j] = W[j][i] = integrate_interior(poly, Polynomial2.monomial(n, i, j))
    Z = [integrate_boundary(poly, Polynomial2.monomial(n, i)) for i in range(n + 1)]
    exact = isinstance(W[0][0], Fraction)
    Wf = np.array([[float(v) for v in row] for row in W])
    Zf = np.array([float(v) for v in Z])
    if exact:
        return MomentData(Wf, Zf, tuple(tuple(r) for r in W), tuple(Z))
    return MomentData(Wf, Zf)


def boundary_barycenter(poly: LabelledPolytope) -> np.ndarray:
    md = moments(poly)
    return md.Z[1:] / md.Z[0]


def psi_map(poly: LabelledPolytope, f: AffineFunction) -> np.ndarray:
    """sum_k (int_{F_k} f dsigma_nu) nu_k; equals -vol(P) * linear(f)."""
    g = f.as_polynomial()
    out = np.zeros(poly.dim)
    for k in range(poly.n_facets):
        out += float(integrate_facet(poly, k, g)) * poly.normals[k]
    return out


# -- quadrature --------------------------------------------------------------

@lru_cache(maxsize=32)
def _reference_rule(n: int, order: int):
    """Barycentric nodes (q, n+1) and weights on the reference simplex (sum = 1/n!)."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    grids = np.meshgrid(*([x] * n), indexing="ij")
    xi = np.stack([g.ravel() for g in grids], axis=1)
    wts = np.prod(np.stack(np.meshgrid(*([w] * n), indexing="ij")), axis=0).ravel()
    lam = np.empty((xi.shape[0], n + 1))
    rest = np.ones(xi.shape[0])
    jac = np.ones(xi.shape[0])
    for i in range(n):
        lam[:, i + 1] = xi[:, i] * rest
        jac *= (1.0 - xi[:, i]) ** (n - 1 - i)
        rest = rest * (1.0 - xi[:, i])
    lam[:, 0] = rest
    return lam, wts * jac


def _bisect(V: np.ndarray):
    m = len(V)
    best, pair = -1.0, (0, 1)
    for i in range(m):
        for j in range(i + 1, m):
            d = np.sum((V[i] - V[j]) ** 2)
            if d > best:
                best, pair = d, (i, j)
    i, j = pair
    mid = 0.5 * (V[i] + V[j])
    a, b = V.copy(), V.copy()
    a[i] = mid
    b[j] = mid
    return a, b


def refined_simplices(poly: LabelledPolytope, level: int) -> list[np.ndarray]:
    """Fan triangulation refined ``level`` times; each level splits every simplex into 2^n."""
    simplices = [s.vertices.astype(float) for s in triangulate(poly)]
    for _ in range(level * poly.dim):
        simplices = [c for V in simplices for c in _bisect(V)]
    return simplices


def quadrature_rule(poly: LabelledPolytope, order: int = 12, level: int = 0):
    """Nodes (q, n) and weights (q,) integrating smooth functions over P."""
    lam, w = _reference_rule(poly.dim, order)
    pts, wts = [], []
    fact = math.factorial(poly.dim)
    for V in refined_simplices(poly, level):
        vol = abs(np.linalg.det(V[1:] - V[0])) / fact
        pts.append(lam @ V)
        wts.append(w * vol * fact)
    return np.concatenate(pts), np.concatenate(wts)


def integrate_function(poly: LabelledPolytope, func, order: int = 12, level: int = 0) -> float:
    """int_P func dx for a vectorised ``func`` mapping (q, n) points to (q,) values."""
    pts, wts = quadrature_rule(poly, order, level)
    return float(np.asarray(func(pts)) @ wts)


def exp_weighted_moments(poly, a, p, tol=1e-10, order=12, max_level=6):
    """(int w, int w y, int w y y^T) with w = exp(2<a, y>), y = x - p, converged under refinement."""
    a = np.asarray(a, dtype=float)
    p = np.asarray(p, dtype=float)
    prev = None
    for level in range(max_level + 1):
        pts, wts = quadrature_rule(poly, order, level)
        y = pts - p
        w = wts * np.exp(2.0 * y @ a)
        cur = (w.sum(), w @ y, np.einsum("q,qi,qj->ij", w, y, y))
        if prev is not None:
            scale = cur[0] * (1.0 + poly.diameter) ** 2
            err = max(
                abs(cur[0] - prev[0]),
                np.abs(cur[1] - prev[1]).max(initial=0.0),
                np.abs(cur[2] - prev[2]).max(initial=0.0),
            )
            if err <= tol * scale:
                return cur
        prev = cur
    raise QuadratureNotConverged(f"exp-weighted moments not converged after {max_level} refinements")


def integrate_exp_weighted(poly, a, p, g: Polynomial2, tol=1e-10, order=12, max_level=6) -> float:
    """int_P exp(2<a, x - p>) g(x) dx, refined until two successive levels agree to ``tol``."""
    a = np.asarray(a, dtype=float)
    p = np.asarray(p, dtype=float)
    prev = None
    for level in range(max_level + 1):
        pts, wts = quadrature_rule(poly, order, level)
        w = wts * np.exp(2.0 * (pts - p) @ a)
        vals = g(pts)
        cur = float(w @ vals)
        scale = float(w @ np.abs(vals))
        if prev is not None and abs(cur - prev) <= tol * max(scale, np.finfo(float).tiny):
            return cur
        prev = cur
    raise QuadratureNotConverged(
        f"exp-weighted integral not converged after {max_level} refinements (last {prev})"
    )
