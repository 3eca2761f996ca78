"""Label algebra: monotonicity, the Einstein normalisation, lattices and cone angles."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _exact
from .errors import (
    FacetMismatch,
    IrrationalInput,
    NonIntegralLabels,
    NormalizationRequired,
    NotCollinear,
    PointNotInterior,
)
from .measure import Polynomial2, integrate_boundary
from .polytope import LabelledPolytope

MONOTONE_RTOL = 1e-9
SMOOTH_TOL = 1e-12


@dataclass(frozen=True)
class MonotoneCertificate:
    preferred_point: np.ndarray
    common_value: float
    residual: float
    exact_point: tuple | None = None
    exact_value: Fraction | None = None


def _exact_monotone(poly: LabelledPolytope):
    hs = poly.halfspaces
    if not all(h.is_exact for h in hs):
        return None
    n = poly.dim
    rows = [[a - b for a, b in zip(h.normal, hs[0].normal)] for h in hs[1:]]
    rhs = [hs[0].offset - h.offset for h in hs[1:]]
    for idx in itertools.combinations(range(len(rows)), n):
        A = [rows[i] for i in idx]
        if _exact.det(A) == 0:
            continue
        p = _exact.solve(A, [rhs[i] for i in idx])
        vals = [sum(a * b for a, b in zip(h.normal, p)) + h.offset for h in hs]
        if all(v == vals[0] for v in vals) and vals[0] > 0:
            return tuple(p), vals[0]
        return None
    return None


def monotone_point(poly: LabelledPolytope) -> MonotoneCertificate | None:
    """Point where all defining functions agree, or None if the labelling is not monotone."""
    N, c = poly.normals, poly.offsets
    if poly.n_facets == 1:
        return None
    A = N[1:] - N[0]
    b = c[0] - c[1:]
    p, *_ = np.linalg.lstsq(A, b, rcond=None)
    vals = poly.defining(p)
    value = float(vals.mean())
    if value <= 0:
        return None
    residual = float(np.abs(vals - value).max() / value)
    if residual > MONOTONE_RTOL or not poly.contains(p):
        return None
    exact = _exact_monotone(poly)
    if exact is not None:
        ep, ev = exact
        return MonotoneCertificate(np.array([float(t) for t in ep]), float(ev), 0.0, ep, ev)
    return MonotoneCertificate(p, value, residual)


def cone_labels(poly: LabelledPolytope, lam, p) -> LabelledPolytope:
    """Relabel nu_k -> lam * nu_k / L_k(p); the result is monotone at p with value lam."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    pf = np.asarray([float(t) for t in p])
    if not poly.contains(pf):
        raise PointNotInterior(f"point {pf.tolist()} is not interior")
    if all(h.is_exact for h in poly.halfspaces) and _exact.is_exact(lam) and all(_exact.is_exact(t) for t in p):
        vals = [sum(a * Fraction(b) for a, b in zip(h.normal, p)) + h.offset for h in poly.halfspaces]
        return poly.relabel([Fraction(lam) / v for v in vals])
    return poly.relabel([float(lam) / v for v in poly.defining(pf)])


def einstein_normalize(poly: LabelledPolytope) -> tuple[LabelledPolytope, MonotoneCertificate]:
    """Labels nu_k / L_k(barycenter): monotone, common value 1, constant extremal function."""
    if poly.is_exact and all(h.is_exact for h in poly.halfspaces):
        bary = poly.exact_barycenter()
        out = cone_labels(poly, 1, bary)
        cert = MonotoneCertificate(
            np.array([float(t) for t in bary]), 1.0, 0.0, tuple(bary), Fraction(1)
        )
        return out, cert
    bary = poly.barycenter
    out = cone_labels(poly, 1.0, bary)
    vals = out.defining(bary)
    return out, MonotoneCertificate(bary.copy(), 1.0, float(np.abs(vals - 1.0).max()))


def preferred_point_formula(poly: LabelledPolytope) -> np.ndarray:
    """n / ((n+1) int_dP dsigma) * (int_dP x_i dsigma)_i, valid when L_k(0) = 1 for all k."""
    n = poly.dim
    if not poly.contains(np.zeros(n)) or np.abs(poly.offsets - 1.0).max() > MONOTONE_RTOL:
        raise NormalizationRequired("requires 0 in P and L_k(0) = 1 for every facet")
    z0 = float(integrate_boundary(poly, Polynomial2.monomial(n, 0)))
    zi = np.array([float(integrate_boundary(poly, Polynomial2.monomial(n, i))) for i in range(1, n + 1)])
    return n / ((n + 1) * z0) * zi


# -- lattices ------------------------------------------------------------------

@dataclass(frozen=True)
class RationalityReport:
    is_lattice_polytope: bool
    vertex_denominator: int | None
    minimal_scale: Fraction | None
    scaled_normals: tuple | None


def _rational_labels(poly: LabelledPolytope):
    out = []
    for h in poly.halfspaces:
        row = [_exact.recognize(v) for v in h.normal]
        if any(v is None for v in row):
            return None
        out.append(tuple(row))
    return out


def _rational_vertices(poly: LabelledPolytope):
    if poly.is_exact:
        return poly.exact_vertices
    out = []
    for v in poly.vertices:
        row = [_exact.recognize(t) for t in v]
        if any(t is None for t in row):
            return None
        out.append(tuple(row))
    return out


def rationality(poly: LabelledPolytope, strict: bool = True) -> RationalityReport:
    """Lattice-polytope test (w.r.t. Z^n after clearing vertex denominators) and the
    least s > 0 with s * nu_k integral for all k.

    Float labels are accepted when they are recognisably rational; otherwise
    IrrationalInput is raised (``strict``) or the scale is reported as None.
    """
    verts = _rational_vertices(poly)
    den = None
    if verts is not None:
        den = _exact.lcm(Fraction(t).denominator for v in verts for t in v)
    labels = _rational_labels(poly)
    if labels is None:
        if strict:
            raise IrrationalInput("labels are not rational")
        return RationalityReport(verts is not None, den, None, None)
    s = _exact.minimal_integral_scale(labels)
    scaled = tuple(tuple(int(s * t) for t in nu) for nu in labels)
    return RationalityReport(verts is not None, den, s, scaled)


@dataclass(frozen=True)
class DelzantReport:
    determinants: tuple  # (vertex coordinates, incident facets, |det|) per vertex
    is_delzant: bool
    lattice_index: int
    caveat: str | None


def delzant_check(poly: LabelledPolytope, rescale: bool = False) -> DelzantReport:
    """|det| of the incident normals at every vertex, with respect to Z^n."""
    labels = _rational_labels(poly)
    if labels is None:
        raise NonIntegralLabels("labels are not rational")
    if rescale:
        s = _exact.minimal_integral_scale(labels)
        labels = [tuple(s * t for t in nu) for nu in labels]
    if any(Fraction(t).denominator != 1 for nu in labels for t in nu):
        raise NonIntegralLabels("labels are not integral (use rescale=True)")
    ints = [[int(t) for t in nu] for nu in labels]
    rows = []
    for v, fs in zip(poly.vertices, poly.vertex_facets):
        d = abs(int(_exact.det([ints[k] for k in sorted(fs)])))
        rows.append((tuple(float(t) for t in v), tuple(sorted(fs)), d))
    index = 0
    for idx in itertools.combinations(range(len(ints)), poly.dim):
        index = math.gcd(index, abs(int(_exact.det([ints[k] for k in idx]))))
    caveat = None
    if index != 1:
        caveat = f"labels span a sublattice of index {index} in Z^n; determinants are relative to Z^n"
    return DelzantReport(tuple(rows), all(r[2] == 1 for r in rows), index, caveat)


# -- cone angles -----------------------------------------------------------------

class SingularityClass(enum.Enum):
    CONICAL = "conical"
    SMOOTH = "smooth"
    LARGE_ANGLE = "large-angle"


@dataclass(frozen=True)
class FacetSingularity:
    facet: int
    ratio: float
    kind: SingularityClass
    exact_ratio: Fraction | None = None

    @property
    def angle(self) -> float:
        return 2 * math.pi * self.ratio


@dataclass(frozen=True)
class SingularityReport:
    facets: tuple
    smooth_tol: float

    @property
    def ratios(self) -> np.ndarray:
        return np.array([f.ratio for f in self.facets])


def _exact_ratio(eta, nu):
    if not all(_exact.is_exact(t) for t in (*eta, *nu)):
        return None
    j = next(i for i, t in enumerate(nu) if t != 0)
    r = Fraction(eta[j]) / Fraction(nu[j])
    if all(Fraction(e) == r * Fraction(v) for e, v in zip(eta, nu)):
        return r
    return None


def cone_angles(reference: LabelledPolytope, candidate: LabelledPolytope, smooth_tol: float = SMOOTH_TOL) -> SingularityReport:
    """Ratios a_k with a_k nu_k = eta_k and the resulting singularity type of each facet."""
    if reference.n_facets != candidate.n_facets or reference.dim != candidate.dim:
        raise FacetMismatch("polytopes have different facet counts")
    if len(reference.vertices) != len(candidate.vertices) or not np.allclose(
        reference.vertices, candidate.vertices, atol=1e-9 * max(reference.diameter, 1.0)
    ):
        raise FacetMismatch("polytopes have different vertices")
    out = []
    for k, (he, hn) in enumerate(zip(reference.halfspaces, candidate.halfspaces)):
        eta = reference.normals[k]
        nu = candidate.normals[k]
        cos = eta @ nu / (np.linalg.norm(eta) * np.linalg.norm(nu))
        if cos < 1 - 1e-12:
            raise NotCollinear(f"facet {k}: normals {eta.tolist()} and {nu.tolist()} are not positively collinear")
        exact = _exact_ratio(he.normal, hn.normal)
        a = float(exact) if exact is not None else float(np.linalg.norm(eta) / np.linalg.norm(nu))
        if abs(a - 1.0) <= smooth_tol:
            kind = SingularityClass.SMOOTH
        elif a < 1.0:
            kind = SingularityClass.CONICAL
        else:
            kind = SingularityClass.LARGE_ANGLE
        out.append(FacetSingularity(k, a, kind, exact))
    return SingularityReport(tuple(out), smooth_tol)
