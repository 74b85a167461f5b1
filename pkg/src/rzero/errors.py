"""Exception hierarchy shared by all modules."""


class RZeroError(Exception):
    """Base class for library errors."""


class InvalidInput(RZeroError, ValueError):
    pass


class DegenerateFamily(RZeroError):
    """Sum of squares vanishes where it must not, or vanishes on an interval."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SingularWronskian(RZeroError):
    def __init__(self, t):
        super().__init__(f"Wronskian W(f1, f2) is singular at t={t!r}")
        self.t = t


class VerticalTangent(RZeroError):
    def __init__(self, t):
        super().__init__(f"f1 vanishes at t={t!r}; tangent slope undefined")
        self.t = t


class DegenerateGamma(RZeroError):
    pass


class GammaNonEmpty(RZeroError):
    def __init__(self, points):
        super().__init__(f"inflection set is non-empty: {list(points)!r}; split the interval")
        self.points = list(points)


class InvalidDensity(RZeroError, ValueError):
    pass


class QuadratureFailure(RZeroError):
    pass


class DegenerateSample(RZeroError):
    """F(t; x) vanishes identically in t."""
