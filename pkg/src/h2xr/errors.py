"""Exception hierarchy.

``GeometryError`` covers violated preconditions (bad parameters, degenerate
points, stencils leaving a domain). ``NumericalError`` covers iterative
procedures that failed to converge; the CLI maps it to its own exit code.
"""


class GeometryError(ValueError):
    pass


class NumericalError(ArithmeticError):
    pass


class NoConvergence(NumericalError):
    pass


class DomainClip(GeometryError):
    pass


class SingularIntegrand(GeometryError):
    pass


class NonSpacelikeSpeed(GeometryError):
    pass


class NotOnH2(GeometryError):
    pass


class DegeneratePoint(GeometryError):
    pass


class DegenerateAngle(GeometryError):
    pass


class NotCanonical(GeometryError):
    pass


class InvalidCurvePair(GeometryError):
    pass


class InvalidFrame(GeometryError):
    pass


class InvalidConstants(GeometryError):
    pass


class DegenerateParameters(GeometryError):
    pass


class EmptyDomain(GeometryError):
    pass


class UnknownExample(GeometryError):
    pass


class SpecError(ValueError):
    """Malformed family or run configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
