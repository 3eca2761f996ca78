"""Small exact-rational helpers (Fraction linear algebra, rational recognition)."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

MAX_DENOMINATOR = 10_000
RECOGNITION_RTOL = 1e-11


def is_exact(value) -> bool:
    return isinstance(value, Rational)


def as_exact(value):
    """Integers become Fractions; Fractions pass through; floats are left alone."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Rational):
        return Fraction(value)
    return float(value)


def recognize(value, max_denominator=MAX_DENOMINATOR, rtol=RECOGNITION_RTOL):
    """Return an exact Fraction for ``value`` or None if it does not look rational."""
    if isinstance(value, Rational):
        return Fraction(value)
    x = float(value)
    if not math.isfinite(x):
        return None
    q = Fraction(x).limit_denominator(max_denominator)
    if abs(float(q) - x) <= rtol * max(1.0, abs(x)):
        return q
    return None


def solve(a, b):
    """Solve the square system a x = b over the rationals by Gaussian elimination."""
    n = len(a)
    m = [[Fraction(v) for v in row] + [Fraction(rhs)] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular rational system")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def det(a):
    n = len(a)
    m = [[Fraction(v) for v in row] for row in a]
    sign = 1
    out = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        out *= m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return sign * out


def lcm(values):
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def minimal_integral_scale(vectors):
    """Least positive rational s such that s*v is integral for every rational vector v."""
    entries = [Fraction(x) for v in vectors for x in v if x != 0]
    if not entries:
        raise ValueError("all vectors vanish")
    den = lcm(e.denominator for e in entries)
    g = 0
    for e in entries:
        g = math.gcd(g, abs(e.numerator * (den // e.denominator)))
    return Fraction(den, g)
