import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abreu_lab.errors import BadIndex, QuadratureNotConverged
from abreu_lab.generators import hirzebruch, random_polytope, simplex, square
from abreu_lab.measure import (
    AffineFunction,
    Polynomial2,
    boundary_barycenter,
    integrate_boundary,
    integrate_exp_weighted,
    integrate_facet,
    integrate_function,
    integrate_interior,
    moments,
    psi_map,
)
from abreu_lab.polytope import from_halfspaces

from oracles import dblquad_polygon, monte_carlo, shoelace

seeds = st.integers(min_value=0, max_value=2**32 - 1)
ONE = lambda n: Polynomial2.monomial(n, 0)


# -- facet measures -----------------------------------------------------------------

@pytest.mark.parametrize("n, expected", [(2, Fraction(1)), (3, Fraction(1, 2))])
def test_simplex_facets_have_equal_mass(n, expected):
    P = simplex(n)
    masses = [integrate_facet(P, k, ONE(n)) for k in range(n + 1)]
    assert masses == [expected] * (n + 1)


def test_square_facet_mass_is_length():
    P = square()
    assert [integrate_facet(P, k, ONE(2)) for k in range(4)] == [2, 2, 2, 2]


def test_doubling_a_label_halves_its_facet():
    P = square()
    Q = P.relabel([2, 1, 1, 1])
    assert integrate_facet(Q, 0, ONE(2)) == Fraction(1)
    assert [integrate_facet(Q, k, ONE(2)) for k in range(1, 4)] == [2, 2, 2]


def test_relabelled_boundary_barycenter():
    # facet x1 = -1 loses half its weight; the boundary barycenter moves right
    Q = square().relabel([2, 1, 1, 1])
    assert np.allclose(boundary_barycenter(Q), [1 / 7, 0.0], atol=1e-15)


def test_facet_index_checked():
    with pytest.raises(BadIndex):
        integrate_facet(square(), 4, ONE(2))


def test_trapezoid_boundary_moments_exact():
    P = hirzebruch(1)
    md = moments(P)
    assert md.W_exact[0][0] == Fraction(3, 2)
    assert [integrate_facet(P, k, ONE(2)) for k in range(4)] == [
        Fraction(5, 7), Fraction(8, 7), Fraction(1), Fraction(1)]
    assert md.Z_exact[0] == Fraction(27, 7)


# -- interior integrals -------------------------------------------------------------

@given(seeds)
def test_interior_moments_match_shoelace(seed):
    P = random_polytope(np.random.default_rng(seed))
    md = moments(P)
    area, centroid = shoelace(P.vertices)
    assert md.W[0, 0] == pytest.approx(area, rel=1e-12)
    assert md.W[0, 1:] / md.W[0, 0] == pytest.approx(centroid, rel=1e-10, abs=1e-10 * P.diameter)


def test_second_moments_against_dblquad():
    P = hirzebruch(1)
    md = moments(P)
    xlim = (1.0, 2.0)
    for i in range(3):
        for j in range(i, 3):
            f = lambda x, y, i=i, j=j: ([1, x, y][i]) * ([1, x, y][j])
            ref = dblquad_polygon(P.normals, P.offsets, f, xlim)
            assert md.W[i, j] == pytest.approx(ref, rel=1e-12)


@pytest.mark.slow
def test_second_moments_against_monte_carlo():
    P = random_polytope(np.random.default_rng(5))
    g = Polynomial2(0.5, (1.0, -2.0), ((1.0, 0.25), (0.25, 3.0)))
    est, se = monte_carlo(P.vertices, P.normals, P.offsets, g, 10_000_000, np.random.default_rng(7))
    assert float(integrate_interior(P, g)) == pytest.approx(est, abs=5 * se)


def test_exact_polynomial_integral_on_unit_square():
    P = from_halfspaces(2, [((1, 0), 0), ((-1, 0), 1), ((0, 1), 0), ((0, -1), 1)])
    # int x^2 = 1/3, int x y = 1/4
    assert integrate_interior(P, Polynomial2.monomial(2, 1, 1)) == Fraction(1, 3)
    assert integrate_interior(P, Polynomial2.monomial(2, 1, 2)) == Fraction(1, 4)


def test_quadrature_rule_integrates_polynomials():
    P = random_polytope(np.random.default_rng(11), dim=3)
    g = Polynomial2(1.0, (0.3, -0.7, 2.0), ((1.0, 0.2, 0.0), (0.2, -1.0, 0.5), (0.0, 0.5, 0.3)))
    assert integrate_function(P, g, order=4) == pytest.approx(float(integrate_interior(P, g)), rel=1e-12)


# -- divergence identity -----------------------------------------------------------

@given(seeds, st.sampled_from([2, 3]))
def test_boundary_integral_of_defining_function_vanishes(seed, dim):
    # L_k vanishes identically on F_k
    P = random_polytope(np.random.default_rng(seed), dim=dim)
    k = int(np.random.default_rng(seed + 1).integers(P.n_facets))
    Lk = AffineFunction(P.offsets[k], P.normals[k]).as_polynomial()
    assert abs(float(integrate_facet(P, k, Lk))) <= 1e-12 * P.diameter * float(integrate_facet(P, k, ONE(dim)))


@given(seeds, st.sampled_from([2, 3]), st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_psi_identity(seed, dim, coeffs):
    P = random_polytope(np.random.default_rng(seed), dim=dim)
    f = AffineFunction(coeffs[0], coeffs[1:dim + 1])
    lin = np.asarray(f.linear)
    out = psi_map(P, f)
    scale = max(P.volume * np.linalg.norm(lin), float(np.abs(
        [float(integrate_facet(P, k, f.as_polynomial())) for k in range(P.n_facets)]).max()), 1e-300)
    assert np.linalg.norm(out + P.volume * lin) <= 1e-9 * scale


@given(seeds, st.lists(st.floats(0.1, 10), min_size=8, max_size=8))
def test_psi_independent_of_labels(seed, scales):
    P = random_polytope(np.random.default_rng(seed))
    Q = P.relabel(scales[: P.n_facets] + [1.0] * max(0, P.n_facets - 8))
    f = AffineFunction(0.4, (1.0, -0.5))
    assert np.allclose(psi_map(P, f), psi_map(Q, f), rtol=1e-9, atol=1e-9 * P.volume)


def test_boundary_equals_sum_of_facets():
    P = hirzebruch(1)
    g = Polynomial2.monomial(2, 1, 2)
    assert integrate_boundary(P, g) == sum(integrate_facet(P, k, g) for k in range(4))


# -- exponential weights -----------------------------------------------------------

def test_exp_weighted_matches_dblquad():
    P = hirzebruch(1)
    a, p = np.array([0.7, -0.4]), np.array([14 / 9, 7 / 9])
    g = Polynomial2.monomial(2, 1)
    val = integrate_exp_weighted(P, a, p, g, tol=1e-13)
    ref = dblquad_polygon(P.normals, P.offsets,
                          lambda x, y: x * math.exp(2 * (a[0] * (x - p[0]) + a[1] * (y - p[1]))), (1.0, 2.0))
    assert val == pytest.approx(ref, rel=1e-12)


def test_exp_weighted_with_zero_vector_is_plain_integral():
    P = square()
    g = Polynomial2.monomial(2, 1, 1)
    assert integrate_exp_weighted(P, [0, 0], [0, 0], g) == pytest.approx(4 / 3, rel=1e-13)


def test_unresolvable_weight_raises():
    with pytest.raises(QuadratureNotConverged):
        integrate_exp_weighted(square(), [40.0, 0.0], [0.0, 0.0], ONE(2), tol=1e-14, order=3, max_level=1)
