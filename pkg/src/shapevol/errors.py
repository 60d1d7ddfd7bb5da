"""Exception hierarchy shared across the package."""


class ShapevolError(Exception):
    """Base class for all errors raised by this package."""


class NonPlanar(ShapevolError):
    """Crossing data fails the Euler check V - E + F = 2."""


class DanglingSegment(ShapevolError):
    """A segment id does not appear exactly once as input and once as output."""


class BadLabel(ShapevolError):
    """A surgery label is malformed (e.g. p/q not in lowest terms)."""


class UnknownComponent(ShapevolError):
    pass


class UnknownSegment(ShapevolError):
    pass


class IllegalSite(ShapevolError):
    """A Reidemeister rewrite was requested at a location where it does not apply."""


class DegenerateBraiding(ShapevolError):
    """The braiding map is undefined: A = 0 or an output component is 0 or infinite."""


class DegenerateShape(ShapevolError):
    """A shape parameter is 0, 1 or infinite where that is not allowed."""


class InconsistentPinch(ShapevolError):
    """One pinch relation holds but another fails; the shaping is invalid."""


class ModulusMismatch(ShapevolError):
    """Arithmetic attempted between values with different modulus directions."""


class InconsistentRegionHolonomy(ShapevolError):
    """The product of a-variables around a region is not 1; invalid shaping."""


class LongitudeMismatch(ShapevolError):
    """exp(2 pi i s(l)) does not match the longitude eigenvalue."""


class IncompatibleTarget(ShapevolError):
    """A target log-decoration differs from the induced one by a non-integer."""


class PinchedCrossing(ShapevolError):
    """Operation requires a non-pinched crossing (kappa undefined at a pinch)."""


class FillingIncompatible(ShapevolError):
    """The shaping violates rho(m)^p rho(l)^q = 1 on a rationally labeled component."""


class NotParabolic(ShapevolError):
    """A cusp component has meridian eigenvalue different from +-1."""


class MissingTarget(ShapevolError):
    """No log-decoration target supplied for a boundary component that needs one."""


class NoSolutionFound(ShapevolError):
    """All solver starts failed to reach the requested tolerance."""


class GaugeDeficient(ShapevolError):
    """The solve system stays rank-deficient; more pinned variables are needed."""


class NotCoprime(ShapevolError):
    pass


class CFUndefined(ShapevolError):
    """Continued fraction evaluation hit a division by zero."""


class NoCFFound(ShapevolError):
    """No continued fraction expansion reproduces the requested gluing matrix."""


class BVariableMismatch(ShapevolError):
    """Gluing sites have different b-values; conjugate the shaping first."""


class InvalidMatrix(ShapevolError):
    """A gluing matrix does not satisfy rq - ps = -1."""


class ParseError(ShapevolError):
    """Malformed JSON input."""


class ValidationError(ShapevolError):
    pass
