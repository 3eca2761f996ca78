import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abreu_lab.errors import IllConditioned
from abreu_lab.extremal import barycenter_criterion, extremal_affine
from abreu_lab.generators import hirzebruch, random_lattice_polygon, random_polytope, rectangle, simplex, square
from abreu_lab.labelling import einstein_normalize
from abreu_lab.measure import moments

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.mark.parametrize("make, value", [(square, 4), (lambda: simplex(2), 12), (lambda: hirzebruch(1), Fraction(36, 7))])
def test_known_constant_extremal_functions(make, value):
    r = extremal_affine(make())
    assert r.is_constant
    assert r.exact_coefficients == (value, 0, 0)


def test_three_simplex():
    # common value 1/4, so A = 2n / (1/4)
    r = extremal_affine(simplex(3))
    assert r.exact_coefficients == (24, 0, 0, 0)


def test_rectangle_is_not_constant():
    r = extremal_affine(rectangle())
    assert not r.is_constant
    assert r.exact_coefficients[2] == 0
    assert r.exact_coefficients[1] != 0


def test_solves_moment_system():
    P = random_polytope(np.random.default_rng(3))
    r = extremal_affine(P)
    md = moments(P)
    assert np.allclose(md.W @ r.coefficients, 2 * md.Z, rtol=1e-12)


def test_far_translate_warns_but_stays_exact():
    P = square().translated((1000, 1000))
    with pytest.warns(IllConditioned):
        r = extremal_affine(P)
    assert r.exact_coefficients == (4, 0, 0)


def test_near_origin_does_not_warn():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        extremal_affine(hirzebruch(1))


@given(seeds)
def test_translation_shifts_linear_part_only(seed):
    P = random_polytope(np.random.default_rng(seed))
    t = np.random.default_rng(seed).normal(size=2)
    A = extremal_affine(P).A
    B = extremal_affine(P.translated(t)).A
    x = P.barycenter
    assert np.allclose(B.linear, A.linear, rtol=1e-8, atol=1e-8 * abs(A.constant))
    assert B(x + t) == pytest.approx(A(x), rel=1e-8)


@given(seeds, st.floats(0.01, 100))
def test_uniform_scaling_law(seed, s):
    P = random_polytope(np.random.default_rng(seed))
    Q = P.relabel([s] * P.n_facets)
    ma, mb = moments(P), moments(Q)
    assert np.allclose(mb.Z, ma.Z / s, rtol=1e-10)
    assert np.allclose(extremal_affine(Q).coefficients, extremal_affine(P).coefficients / s,
                       rtol=1e-10, atol=1e-10 * abs(extremal_affine(P).coefficients[0]))


def _agree(P):
    return extremal_affine(P).is_constant == barycenter_criterion(P).coincide


def test_constancy_iff_barycenters_coincide():
    rng = np.random.default_rng(20240617)
    n_const = 0
    for _ in range(250):
        P = random_polytope(rng)
        assert _agree(P)
        Q, _ = einstein_normalize(P)
        assert _agree(Q)
        n_const += extremal_affine(Q).is_constant
    assert n_const == 250


def test_constancy_iff_on_lattice_polygons():
    rng = np.random.default_rng(1)
    for _ in range(50):
        P = random_lattice_polygon(rng)
        assert _agree(P)
        assert _agree(einstein_normalize(P)[0])


def test_barycenters_of_trapezoid():
    b = barycenter_criterion(hirzebruch(1))
    assert b.coincide
    assert np.allclose(b.bary_interior, [14 / 9, 7 / 9])
    assert np.allclose(b.bary_boundary, [14 / 9, 7 / 9])
