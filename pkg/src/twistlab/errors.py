"""Exception types raised by twistlab.

Every error derives from ``TwistlabError`` and from the closest builtin, so
callers can catch either.
"""


class TwistlabError(Exception):
    """Base class for all twistlab errors."""


class DomainError(TwistlabError, ValueError):
    """Argument outside the mathematical domain of a function."""


class RangeError(TwistlabError, OverflowError):
    """Result would overflow or underflow double precision."""


class SpecError(TwistlabError, ValueError):
    """Inconsistent or incomplete mode or crystal parameters."""


class GeometryError(TwistlabError, ValueError):
    """Beam does not fit on the requested grid."""


class AliasingError(TwistlabError, ValueError):
    """Phase pattern or field would be undersampled by the grid."""


class ResolutionError(TwistlabError, ValueError):
    """Quadrature or grid too coarse for the requested accuracy."""


class ExtentError(TwistlabError, ValueError):
    """Lookup or integration domain outside the sampled region."""


class ShapeError(TwistlabError, ValueError):
    """Data do not have the expected shape (e.g. no ring to measure)."""


class PlaneError(TwistlabError, ValueError):
    """Operation applied to a field in the wrong plane (real vs k)."""


class PreconditionError(TwistlabError, ValueError):
    """Inputs violate a documented precondition (e.g. not normalised)."""


class TruncationError(TwistlabError, ValueError):
    """Truncated sum misses a non-negligible part of the distribution."""


class DegenerateStateError(TwistlabError, ValueError):
    """State cannot be normalised (zero norm)."""


class ConfigError(TwistlabError, ValueError):
    """Invalid configuration file or command-line override."""
