"""Labelled simple convex polytopes: half-space/vertex descriptions and triangulations.

A labelled polytope is stored as an ordered list of half-spaces
``L_k(x) = <normal_k, x> + offset_k > 0``.  The scale of each normal is part of
the data (it is the label).  Rational input (``int`` or ``Fraction``) is kept
exact alongside the float arrays used for numerics.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from . import _exact
from .errors import (
    BadIndex,
    DegenerateHull,
    Empty,
    GeometryError,
    NotSimple,
    RedundantFacet,
    Unbounded,
)

REL_TOL = 1e-9


@dataclass(frozen=True)
class HalfSpace:
    normal: tuple
    offset: object

    def __post_init__(self):
        normal = tuple(_exact.as_exact(v) for v in self.normal)
        if not normal or all(v == 0 for v in normal):
            raise GeometryError("half-space normal must be nonzero")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", _exact.as_exact(self.offset))

    @property
    def is_exact(self) -> bool:
        return all(_exact.is_exact(v) for v in self.normal) and _exact.is_exact(self.offset)

    def scaled(self, s) -> "HalfSpace":
        return HalfSpace(tuple(s * v for v in self.normal), s * self.offset)

    def __call__(self, x):
        return float(np.dot(np.asarray(self.normal, dtype=float), x) + float(self.offset))


@dataclass(frozen=True)
class Simplex:
    """An m-simplex in R^n given by its m+1 vertices (rows)."""

    vertices: np.ndarray
    indices: tuple = ()

    @property
    def dim(self) -> int:
        return self.vertices.shape[0] - 1

    @property
    def volume(self) -> float:
        """Euclidean m-dimensional volume."""
        m = self.dim
        if m == 0:
            return 1.0
        edges = (self.vertices[1:] - self.vertices[0]).T
        gram = edges.T @ edges
        return math.sqrt(max(np.linalg.det(gram), 0.0)) / math.factorial(m)


@dataclass(frozen=True, eq=False)
class LabelledPolytope:
    dim: int
    halfspaces: tuple
    vertices: np.ndarray
    vertex_facets: tuple
    exact_vertices: tuple | None = None
    _faces: dict = field(default_factory=dict, repr=False, compare=False)

    # -- basic data -------------------------------------------------------
    @property
    def n_facets(self) -> int:
        return len(self.halfspaces)

    @cached_property
    def normals(self) -> np.ndarray:
        a = np.array([[float(v) for v in h.normal] for h in self.halfspaces])
        a.setflags(write=False)
        return a

    @cached_property
    def offsets(self) -> np.ndarray:
        a = np.array([float(h.offset) for h in self.halfspaces])
        a.setflags(write=False)
        return a

    @property
    def is_exact(self) -> bool:
        return self.exact_vertices is not None

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        return float(max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1).max(), 0.0))

    @property
    def tol(self) -> float:
        return REL_TOL * self.diameter

    def defining(self, x) -> np.ndarray:
        """Values of all defining functions, shape ``(..., d)``."""
        x = np.asarray(x, dtype=float)
        return x @ self.normals.T + self.offsets

    def contains(self, x, strict=True) -> bool:
        vals = self.defining(x) / np.linalg.norm(self.normals, axis=1)
        return bool(np.all(vals > self.tol) if strict else np.all(vals >= -self.tol))

    def facet_vertex_indices(self, k: int) -> list[int]:
        _check_index(self, k)
        return [i for i, fs in enumerate(self.vertex_facets) if k in fs]

    @cached_property
    def volume(self) -> float:
        return float(sum(s.volume for s in triangulate(self)))

    @cached_property
    def barycenter(self) -> np.ndarray:
        simplices = triangulate(self)
        vols = np.array([s.volume for s in simplices])
        cents = np.array([s.vertices.mean(axis=0) for s in simplices])
        return vols @ cents / vols.sum()

    def exact_barycenter(self):
        """Barycenter as a tuple of Fractions (exact input only)."""
        if not self.is_exact:
            raise ValueError("polytope has no exact vertex data")
        total = Fraction(0)
        acc = [Fraction(0)] * self.dim
        for simp in triangulate(self):
            pts = [self.exact_vertices[i] for i in simp.indices]
            vol = abs(_exact.det([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]))
            total += vol
            for j in range(self.dim):
                acc[j] += vol * sum(p[j] for p in pts) / (self.dim + 1)
        return tuple(a / total for a in acc)

    # -- relabelling ------------------------------------------------------
    def relabel(self, scales) -> "LabelledPolytope":
        """Same shape with normal k multiplied by ``scales[k] > 0``."""
        scales = list(scales)
        if len(scales) != self.n_facets:
            raise ValueError("one scale per facet required")
        if any(s <= 0 for s in scales):
            raise ValueError("label scales must be positive")
        hs = tuple(h.scaled(_exact.as_exact(s)) for h, s in zip(self.halfspaces, scales))
        exact = self.exact_vertices if all(h.is_exact for h in hs) else None
        return LabelledPolytope(self.dim, hs, self.vertices, self.vertex_facets, exact)

    def with_labels(self, normals) -> "LabelledPolytope":
        """Same shape, new normals (each must be a positive multiple of the old one)."""
        normals = [tuple(_exact.as_exact(v) for v in nu) for nu in normals]
        scales = []
        for h, nu in zip(self.halfspaces, normals):
            old = np.asarray(h.normal, dtype=float)
            new = np.asarray(nu, dtype=float)
            j = int(np.argmax(np.abs(old)))
            s = nu[j] / h.normal[j]
            if s <= 0 or np.linalg.norm(new - float(s) * old) > 1e-9 * np.linalg.norm(new):
                raise GeometryError("new labels must be positive multiples of the old normals")
            scales.append(s)
        return self.relabel(scales)

    def translated(self, v) -> "LabelledPolytope":
        v = [_exact.as_exact(t) for t in v]
        hs = tuple(
            HalfSpace(h.normal, h.offset - sum(a * b for a, b in zip(h.normal, v)))
            for h in self.halfspaces
        )
        vf = np.asarray([float(t) for t in v])
        exact = None
        if self.is_exact and all(_exact.is_exact(t) for t in v):
            exact = tuple(tuple(a + b for a, b in zip(p, v)) for p in self.exact_vertices)
        return LabelledPolytope(self.dim, hs, self.vertices + vf, self.vertex_facets, exact)


def _check_index(poly: LabelledPolytope, k: int):
    if not isinstance(k, (int, np.integer)) or not 0 <= k < poly.n_facets:
        raise BadIndex(f"facet index {k} out of range 0..{poly.n_facets - 1}")


def from_halfspaces(dim: int, halfspaces) -> LabelledPolytope:
    """Build a validated labelled polytope from ``(normal, offset)`` pairs.

    Facet order is the input order.  Raises Empty, Unbounded, RedundantFacet or
    NotSimple with the offending data attached.
    """
    if dim < 1:
        raise GeometryError("dimension must be at least 1")
    hs = tuple(h if isinstance(h, HalfSpace) else HalfSpace(tuple(h[0]), h[1]) for h in halfspaces)
    if not hs:
        raise GeometryError("at least one half-space is required")
    for h in hs:
        if len(h.normal) != dim:
            raise GeometryError(f"normal {h.normal} has wrong dimension (expected {dim})")
    N = np.array([[float(v) for v in h.normal] for h in hs])
    c = np.array([float(h.offset) for h in hs])
    norms = np.linalg.norm(N, axis=1)

    # Chebyshev ball: maximise r with <n_k, x> + c_k >= r |n_k|.
    res = linprog(
        np.r_[np.zeros(dim), -1.0],
        A_ub=np.c_[-N, norms],
        b_ub=c,
        bounds=[(None, None)] * dim + [(None, 1e6)],
        method="highs",
    )
    if res.status == 2 or (res.status == 0 and res.x[-1] <= 1e-12 * (1 + np.abs(c / norms).max())):
        raise Empty(_tightest(N, c, norms))
    if res.status != 0:
        raise GeometryError(f"feasibility LP failed: {res.message}")

    lo, hi = np.empty(dim), np.empty(dim)
    for i in range(dim):
        for sign in (1.0, -1.0):
            obj = np.zeros(dim)
            obj[i] = -sign
            r = linprog(obj, A_ub=-N, b_ub=c, bounds=[(None, None)] * dim, method="highs")
            if r.status == 3:
                y = _recession_direction(N)
                par = [int(k) for k in np.flatnonzero(np.abs(N @ y) <= 1e-9 * norms)]
                raise Unbounded(y.tolist(), par)
            if r.status != 0:
                raise GeometryError(f"bounding LP failed: {r.message}")
            (hi if sign > 0 else lo)[i] = r.x[i]
    scale = float(np.linalg.norm(hi - lo))
    if res.x[-1] <= 1e-12 * max(scale, 1.0):
        raise Empty(_tightest(N, c, norms))
    tol = REL_TOL * scale

    # identical hyperplanes are redundant
    unit = np.c_[N, c] / norms[:, None]
    for i, j in itertools.combinations(range(len(hs)), 2):
        if np.linalg.norm(unit[i] - unit[j]) <= REL_TOL * (1 + scale):
            raise RedundantFacet(j, f"duplicates half-space {i}")

    points: list[np.ndarray] = []
    for subset in itertools.combinations(range(len(hs)), dim):
        A = N[list(subset)]
        if abs(np.linalg.det(A / norms[list(subset), None])) < 1e-12:
            continue
        x = np.linalg.solve(A, -c[list(subset)])
        if np.all((N @ x + c) / norms >= -tol) and not any(
            np.linalg.norm(x - p) <= tol for p in points
        ):
            points.append(x)
    if not points:
        raise Empty()
    vertices = np.array(points)
    dist = (vertices @ N.T + c) / norms
    vertex_facets = []
    for v, row in zip(vertices, dist):
        inc = frozenset(int(k) for k in np.flatnonzero(np.abs(row) <= tol))
        if len(inc) > dim:
            raise NotSimple(v.tolist(), sorted(inc))
        if len(inc) < dim:  # pragma: no cover - enumeration guarantees >= dim
            raise GeometryError(f"vertex {v.tolist()} is on fewer than {dim} facets")
        vertex_facets.append(inc)

    for k in range(len(hs)):
        vk = vertices[[i for i, fs in enumerate(vertex_facets) if k in fs]]
        if len(vk) < dim or (dim > 1 and np.linalg.matrix_rank(vk[1:] - vk[0], tol=tol) < dim - 1):
            raise RedundantFacet(k)

    order = np.lexsort(vertices.T[::-1])
    vertices = vertices[order]
    vertex_facets = tuple(vertex_facets[i] for i in order)
    vertices.setflags(write=False)

    exact = None
    if all(h.is_exact for h in hs):
        exact = tuple(
            tuple(
                _exact.solve(
                    [hs[k].normal for k in sorted(fs)], [-hs[k].offset for k in sorted(fs)]
                )
            )
            for fs in vertex_facets
        )
        vertices = np.array([[float(t) for t in p] for p in exact])
        vertices.setflags(write=False)
    return LabelledPolytope(dim, hs, vertices, vertex_facets, exact)


def _tightest(N, c, norms):
    # constraints that are active at the least-violating point
    res = linprog(
        np.r_[np.zeros(N.shape[1]), 1.0],
        A_ub=np.c_[-N, -norms],
        b_ub=c,
        bounds=[(None, None)] * N.shape[1] + [(0, None)],
        method="highs",
    )
    if res.status != 0:
        return []
    x = res.x[:-1]
    slack = (N @ x + c) / norms
    return [int(k) for k in np.flatnonzero(slack <= slack.min() + 1e-9)]


def _recession_direction(N):
    n = N.shape[1]
    for i in range(n):
        for sign in (1.0, -1.0):
            obj = np.zeros(n)
            obj[i] = -sign
            r = linprog(obj, A_ub=-N, b_ub=np.zeros(len(N)), bounds=[(-1, 1)] * n, method="highs")
            if r.status == 0 and -r.fun > 1e-9:
                return r.x / np.linalg.norm(r.x)
    return np.zeros(n)


def from_vertices(dim: int, points) -> LabelledPolytope:
    """Convex hull of ``points`` with unit inward normals, facets sorted by normal."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise GeometryError(f"points must be an array of shape (m, {dim})")
    if dim == 1:
        lo, hi = pts.min(), pts.max()
        if hi - lo <= 1e-12 * max(1.0, abs(hi)):
            raise DegenerateHull("points do not span a segment")
        return from_halfspaces(1, [((1.0,), -lo), ((-1.0,), hi)])
    if len(pts) <= dim or np.linalg.matrix_rank(pts[1:] - pts[0]) < dim:
        raise DegenerateHull(f"points span less than {dim} dimensions")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateHull(str(exc)) from exc
    # equations: <n, x> + b <= 0 inside, n outward unit
    eqs = np.unique(np.round(hull.equations, 12), axis=0)
    merged: list[np.ndarray] = []
    for e in eqs:
        if not any(np.linalg.norm(e - m) <= 1e-9 for m in merged):
            merged.append(e)
    inward = [(-e[:dim] + 0.0, -e[dim] + 0.0) for e in merged]
    inward.sort(key=lambda t: tuple(t[0]))
    return from_halfspaces(dim, [(tuple(nu), off) for nu, off in inward])


def _face_vertices(poly: LabelledPolytope, S: frozenset) -> list[int]:
    return [i for i, fs in enumerate(poly.vertex_facets) if S <= fs]


def _triangulate_face(poly: LabelledPolytope, S: frozenset) -> list[tuple]:
    cache = poly._faces
    if S in cache:
        return cache[S]
    verts = _face_vertices(poly, S)
    m = poly.dim - len(S)
    if m == 0:
        out = [(verts[0],)]
    else:
        apex = verts[0]  # vertices are stored in lexicographic order
        out = []
        for k in range(poly.n_facets):
            if k in S:
                continue
            T = S | {k}
            sub = _face_vertices(poly, T)
            if not sub or apex in sub:
                continue
            out.extend((apex,) + s for s in _triangulate_face(poly, T))
    cache[S] = out
    return out


def triangulate(poly: LabelledPolytope) -> list[Simplex]:
    """Fan triangulation from the lexicographically smallest vertex (recursively on faces)."""
    return [Simplex(poly.vertices[list(s)], s) for s in _triangulate_face(poly, frozenset())]


def facet_decomposition(poly: LabelledPolytope, k: int) -> list[Simplex]:
    """(n-1)-simplices tiling facet ``k`` (0-based)."""
    _check_index(poly, k)
    return [Simplex(poly.vertices[list(s)], s) for s in _triangulate_face(poly, frozenset({k}))]
