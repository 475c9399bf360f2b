"""Exception hierarchy.

Every validation failure raised by the library is an :class:`MTEError`, so
callers (the CLI in particular) can separate bad input from bugs.
"""


class MTEError(ValueError):
    """Base class for input validation errors."""


class BadDimension(MTEError):
    pass


class NotASimplexPoint(MTEError):
    pass


class EmptyVector(MTEError):
    pass


class BadBand(MTEError):
    pass


class DimensionMismatch(MTEError):
    pass


class ROutOfRange(MTEError):
    pass


class EmptyGroup(MTEError):
    pass


class OutcomeOutOfRange(MTEError):
    pass


class BadBeta(MTEError):
    pass


class BadK(MTEError):
    pass


class NotIntegral(MTEError):
    pass


class MarginalsDiffer(MTEError):
    pass


class ParseError(MTEError):
    """Malformed input file or value; the message carries line/field context."""


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (e.g. greedy and oracle disagree)."""
