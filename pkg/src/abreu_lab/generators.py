"""Built-in example polytopes and random test families."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import GeometryError
from .polytope import LabelledPolytope, from_halfspaces


def square() -> LabelledPolytope:
    """[-1, 1]^2 with L = 1 +- x_i."""
    return from_halfspaces(2, [((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)])


def simplex(n: int = 2) -> LabelledPolytope:
    """Unit n-simplex with normals e_1..e_n, -sum e_i."""
    hs = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        hs.append((tuple(e), 0))
    hs.append((tuple([-1] * n), 1))
    return from_halfspaces(n, hs)


def rectangle() -> LabelledPolytope:
    """[-1, 3] x [-1, 1] labelled so that L_k(0) = 1."""
    return from_halfspaces(
        2, [((1, 0), 1), ((Fraction(-1, 3), 0), 1), ((0, 1), 1), ((0, -1), 1)]
    )


def hirzebruch(C=1) -> LabelledPolytope:
    """Trapezoid with vertices (1,0), (1,1), (2,2), (2,0) and the monotone labels nu(C)."""
    C = Fraction(C) if not isinstance(C, float) else C
    return from_halfspaces(
        2,
        [
            ((C * Fraction(7, 5), 0), -C * Fraction(7, 5)),
            ((-C * Fraction(7, 4), 0), C * Fraction(7, 2)),
            ((0, C), 0),
            ((C, -C), 0),
        ],
    )


def hirzebruch_delzant() -> LabelledPolytope:
    """Same trapezoid with the primitive (Delzant) normals eta."""
    return from_halfspaces(2, [((1, 0), -1), ((-1, 0), 2), ((0, 1), 0), ((1, -1), 0)])


EXAMPLES = {
    "square": square,
    "simplex": simplex,
    "rectangle": rectangle,
    "hirzebruch": hirzebruch,
}


def random_polytope(rng: np.random.Generator, dim: int = 2, n_facets: int | None = None,
                    spread: float = 0.3, max_diameter: float = 20.0, max_tries: int = 100) -> LabelledPolytope:
    """Random simple polytope cut out by tangent-ish half-spaces around a random centre.

    Labels are random positive multiples of random unit normals, so the result
    is a generic labelled polytope.  Draws whose normals cluster produce long
    slivers; those with diameter above ``max_diameter`` are redrawn.
    """
    for _ in range(max_tries):
        d = n_facets or int(rng.integers(dim + 1, dim + 6 if dim == 2 else dim + 9))
        u = rng.normal(size=(d, dim))
        u /= np.linalg.norm(u, axis=1)[:, None]
        r = 1.0 + spread * rng.uniform(-1, 1, size=d)
        scale = rng.uniform(0.3, 3.0, size=d)
        center = rng.normal(size=dim)
        hs = [(tuple(s * ui), float(s * (ri - ui @ center))) for ui, ri, s in zip(u, r, scale)]
        try:
            P = from_halfspaces(dim, hs)
        except GeometryError:
            continue
        if P.diameter <= max_diameter:
            return P
    raise RuntimeError("could not draw a valid random polytope")


def random_lattice_polygon(rng: np.random.Generator, size: int = 4) -> LabelledPolytope:
    """Convex hull of random integer points, labelled by primitive integer normals (exact)."""
    from math import gcd
    from scipy.spatial import ConvexHull

    while True:
        pts = rng.integers(-size, size + 1, size=(8, 2))
        try:
            hull = ConvexHull(pts)
        except Exception:
            continue
        verts = pts[hull.vertices]
        m = len(verts)
        hs = []
        for i in range(m):
            a, b = verts[i], verts[(i + 1) % m]
            nu = np.array([-(b[1] - a[1]), b[0] - a[0]])  # inward for counter-clockwise order
            g = gcd(int(abs(nu[0])), int(abs(nu[1])))
            nu = nu // g
            hs.append(((int(nu[0]), int(nu[1])), int(-(nu @ a))))
        try:
            return from_halfspaces(2, hs)
        except GeometryError:
            continue
