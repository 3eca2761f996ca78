"""Exception hierarchy shared by every module."""


class AbreuLabError(Exception):
    """Base class for all library errors."""


class GeometryError(AbreuLabError, ValueError):
    """Invalid polytope data."""


class Unbounded(GeometryError):
    def __init__(self, direction, facets):
        self.direction = list(direction)
        self.facets = list(facets)
        super().__init__(
            f"half-spaces define an unbounded region: recession direction {self.direction}, "
            f"facets parallel to it: {self.facets}"
        )


class Empty(GeometryError):
    def __init__(self, facets=()):
        self.facets = list(facets)
        msg = "half-spaces have empty (or lower-dimensional) interior"
        if self.facets:
            msg += f"; tightest constraints: {self.facets}"
        super().__init__(msg)


class NotSimple(GeometryError):
    def __init__(self, vertex, facets):
        self.vertex = list(vertex)
        self.facets = list(facets)
        super().__init__(f"vertex {self.vertex} lies on {len(self.facets)} facets {self.facets}")


class RedundantFacet(GeometryError):
    def __init__(self, facet, reason="does not support a codimension-one face"):
        self.facet = facet
        super().__init__(f"half-space {facet} {reason}")


class DegenerateHull(GeometryError):
    pass


class BadIndex(AbreuLabError, IndexError):
    pass


class NormalizationRequired(AbreuLabError, ValueError):
    pass


class PointNotInterior(AbreuLabError, ValueError):
    pass


class IrrationalInput(AbreuLabError, ValueError):
    pass


class NonIntegralLabels(AbreuLabError, ValueError):
    pass


class NotCollinear(AbreuLabError, ValueError):
    pass


class FacetMismatch(AbreuLabError, ValueError):
    pass


class NotMonotone(AbreuLabError, ValueError):
    pass


class QuadratureNotConverged(AbreuLabError, RuntimeError):
    pass


class MaxIterations(AbreuLabError, RuntimeError):
    pass


class OutsideDomain(AbreuLabError, ValueError):
    pass


class PointOnBoundary(OutsideDomain):
    pass


class HessianNotPD(AbreuLabError, ArithmeticError):
    pass


class NoConvergence(AbreuLabError, RuntimeError):
    pass


class DomainMismatch(AbreuLabError, ValueError):
    pass


class ParseError(AbreuLabError, ValueError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class IllConditioned(UserWarning):
    pass
