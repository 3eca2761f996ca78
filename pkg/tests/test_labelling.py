import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abreu_lab.errors import (
    FacetMismatch,
    IrrationalInput,
    NonIntegralLabels,
    NormalizationRequired,
    NotCollinear,
    PointNotInterior,
)
from abreu_lab.extremal import extremal_affine
from abreu_lab.generators import hirzebruch, hirzebruch_delzant, random_lattice_polygon, random_polytope, rectangle, simplex, square
from abreu_lab.labelling import (
    SingularityClass,
    cone_angles,
    cone_labels,
    delzant_check,
    einstein_normalize,
    monotone_point,
    preferred_point_formula,
    rationality,
)
from abreu_lab.measure import boundary_barycenter
from abreu_lab.polytope import from_halfspaces

seeds = st.integers(min_value=0, max_value=2**32 - 1)
scales = st.lists(st.floats(0.05, 20), min_size=8, max_size=8)


# -- monotonicity -------------------------------------------------------------------

def test_trapezoid_preferred_point():
    c = monotone_point(hirzebruch(1))
    assert c.exact_point == (Fraction(14, 9), Fraction(7, 9))
    assert c.exact_value == Fraction(7, 9)


def test_square_preferred_point_is_origin():
    c = monotone_point(square())
    assert c.exact_point == (0, 0) and c.exact_value == 1


def test_not_monotone():
    assert monotone_point(square().relabel([2, 1, 1, 1])) is None


def test_float_labels_monotone():
    P = from_halfspaces(2, [((0.5, 0.0), 0.5), ((-0.5, 0.0), 0.5), ((0.0, 0.5), 0.5), ((0.0, -0.5), 0.5)])
    c = monotone_point(P)
    assert np.allclose(c.preferred_point, 0) and c.common_value == pytest.approx(0.5)
    assert c.exact_point is None


@given(seeds, st.floats(0.1, 10))
def test_cone_labels_are_monotone_at_p(seed, lam):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng)
    w = rng.dirichlet(np.ones(len(P.vertices)))
    p = w @ P.vertices
    Q = cone_labels(P, lam, p)
    c = monotone_point(Q)
    assert c is not None
    assert np.allclose(c.preferred_point, p, atol=1e-9 * P.diameter)
    assert c.common_value == pytest.approx(lam, rel=1e-9)


def test_cone_labels_round_trip():
    P = hirzebruch(1)
    c = monotone_point(P)
    Q = cone_labels(P, c.exact_value, c.exact_point)
    assert Q.halfspaces == P.halfspaces


def test_cone_labels_rejects_outside_point():
    with pytest.raises(PointNotInterior):
        cone_labels(square(), 1, (2, 0))
    with pytest.raises(ValueError):
        cone_labels(square(), 0, (0, 0))


# -- Einstein normalisation ------------------------------------------------------------

def test_trapezoid_normalisation_is_nine_sevenths():
    Q, c = einstein_normalize(hirzebruch(1))
    assert Q.halfspaces == hirzebruch(Fraction(9, 7)).halfspaces
    assert c.exact_point == (Fraction(14, 9), Fraction(7, 9))


def test_rectangle_normalisation():
    Q, c = einstein_normalize(rectangle())
    assert c.exact_point == (1, 0)
    assert extremal_affine(Q).exact_coefficients == (4, 0, 0)


@given(seeds)
def test_normalised_polygon_properties(seed):
    P = random_polytope(np.random.default_rng(seed))
    Q, cert = einstein_normalize(P)
    mc = monotone_point(Q)
    assert mc is not None and mc.residual <= 1e-9
    assert mc.common_value == pytest.approx(1.0, rel=1e-9)
    A = extremal_affine(Q)
    assert abs(A.coefficients[0] - 4) <= 1e-8
    assert np.linalg.norm(A.coefficients[1:]) * P.diameter <= 1e-8
    d = P.diameter
    assert np.linalg.norm(mc.preferred_point - P.barycenter) <= 1e-9 * d
    assert np.linalg.norm(boundary_barycenter(Q) - P.barycenter) <= 1e-9 * d


@given(seeds, st.sampled_from([2, 3]))
def test_normalised_extremal_is_twice_dimension(seed, dim):
    P = random_polytope(np.random.default_rng(seed), dim=dim)
    Q, _ = einstein_normalize(P)
    assert extremal_affine(Q).coefficients[0] == pytest.approx(2 * dim, rel=1e-8)


@given(seeds, scales)
def test_normalisation_ignores_input_labels(seed, s):
    P = random_polytope(np.random.default_rng(seed))
    Q1, _ = einstein_normalize(P)
    Q2, _ = einstein_normalize(P.relabel(s[: P.n_facets]))
    assert np.allclose(Q1.normals, Q2.normals, rtol=1e-10, atol=0)
    assert np.allclose(Q1.offsets, Q2.offsets, rtol=1e-10, atol=1e-10)


def test_exact_normalisation_ignores_input_labels():
    P = hirzebruch(1)
    Q = P.relabel([Fraction(3), Fraction(1, 5), 7, Fraction(2, 3)])
    assert einstein_normalize(Q)[0].halfspaces == einstein_normalize(P)[0].halfspaces


# -- preferred point formula -----------------------------------------------------------

def test_formula_on_rectangle():
    assert np.allclose(preferred_point_formula(rectangle()), [1.0, 0.0], atol=1e-15)
    assert np.allclose(preferred_point_formula(square()), [0.0, 0.0], atol=1e-15)


@given(seeds)
def test_formula_equals_barycenter(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng)
    o = rng.dirichlet(np.ones(len(P.vertices))) @ P.vertices
    R = P.translated(-o)
    R = R.relabel(1.0 / R.offsets)
    assert np.allclose(preferred_point_formula(R), R.barycenter, rtol=0, atol=1e-9 * P.diameter)


def test_formula_requires_normalised_input():
    with pytest.raises(NormalizationRequired):
        preferred_point_formula(hirzebruch(1))


# -- lattices ----------------------------------------------------------------------------

def test_trapezoid_rational_scale():
    r = rationality(hirzebruch(1))
    assert r.is_lattice_polytope and r.vertex_denominator == 1
    assert r.minimal_scale == 20
    assert r.scaled_normals == ((28, 0), (-35, 0), (0, 20), (20, -20))


def test_irrational_labels():
    P = square().relabel([math.sqrt(2), 1, 1, 1])
    with pytest.raises(IrrationalInput):
        rationality(P)
    assert rationality(P, strict=False).minimal_scale is None


def test_recognisable_float_labels():
    P = from_halfspaces(2, [((0.5, 0.0), 0.5), ((-0.25, 0.0), 0.25), ((0.0, 1.0), 1.0), ((0.0, -1.0), 1.0)])
    assert rationality(P).minimal_scale == 4


def test_trapezoid_delzant():
    r = delzant_check(hirzebruch_delzant())
    assert r.is_delzant and r.lattice_index == 1
    assert [d for _, _, d in r.determinants] == [1, 1, 1, 1]


def test_delzant_needs_integral_labels():
    with pytest.raises(NonIntegralLabels):
        delzant_check(hirzebruch(1))
    r = delzant_check(hirzebruch(1), rescale=True)
    assert not r.is_delzant


def test_simplex_delzant():
    assert delzant_check(simplex(2)).is_delzant


def test_singular_vertex():
    P = from_halfspaces(2, [((2, 0), 0), ((0, 1), 0), ((-1, -1), 1)])
    r = delzant_check(P)
    assert not r.is_delzant
    at_origin = [d for v, _, d in r.determinants if np.allclose(v, 0)]
    assert at_origin == [2]


def test_index_two_sublattice_caveat():
    P = from_halfspaces(2, [((2, 0), 0), ((0, 2), 0), ((-2, -2), 2)])
    r = delzant_check(P)
    assert r.lattice_index == 4 and r.caveat is not None


@given(seeds)
def test_lattice_polygons_have_unit_scale(seed):
    P = random_lattice_polygon(np.random.default_rng(seed))
    r = rationality(P)
    assert r.is_lattice_polytope and r.minimal_scale == 1


@given(seeds)
def test_normalised_labels_rational_iff_lattice(seed):
    rng = np.random.default_rng(seed)
    Q, _ = einstein_normalize(random_lattice_polygon(rng))
    r = rationality(Q)
    assert r.is_lattice_polytope and r.minimal_scale is not None
    Q, _ = einstein_normalize(random_polytope(rng))
    r = rationality(Q, strict=False)
    assert not r.is_lattice_polytope and r.minimal_scale is None


# -- cone angles -------------------------------------------------------------------------

def test_trapezoid_cone_angles():
    rep = cone_angles(hirzebruch_delzant(), hirzebruch(1))
    assert [f.exact_ratio for f in rep.facets] == [Fraction(5, 7), Fraction(4, 7), 1, 1]
    assert [f.kind for f in rep.facets] == [SingularityClass.CONICAL, SingularityClass.CONICAL,
                                             SingularityClass.SMOOTH, SingularityClass.SMOOTH]
    assert rep.facets[0].angle == pytest.approx(2 * math.pi * 5 / 7)


def test_identity_and_halved_reference():
    eta = hirzebruch_delzant()
    assert all(f.kind is SingularityClass.SMOOTH for f in cone_angles(eta, eta).facets)
    rep = cone_angles(eta, eta.relabel([Fraction(1, 2)] * 4))
    assert [f.exact_ratio for f in rep.facets] == [2] * 4
    assert all(f.kind is SingularityClass.LARGE_ANGLE for f in rep.facets)


def test_large_angle():
    rep = cone_angles(square().relabel([2, 1, 1, 1]), square())
    assert rep.facets[0].kind is SingularityClass.LARGE_ANGLE
    assert rep.facets[0].exact_ratio == 2


def test_angles_need_collinear_normals():
    ref = from_halfspaces(2, [((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)])
    with pytest.raises(FacetMismatch):
        cone_angles(simplex(2), square())
    with pytest.raises(FacetMismatch):
        cone_angles(square().translated((1, 0)), ref)
    sheared = from_halfspaces(2, [((1, 1), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)])
    with pytest.raises((NotCollinear, FacetMismatch)):
        cone_angles(sheared, ref)
