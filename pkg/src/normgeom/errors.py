"""
Exception types raised by normgeom.

The CLI maps them onto exit codes (see main.py):
 - SpecParseError -> 2
 - NormError, PreconditionError, ComputationError -> 3
"""


class NormError(ValueError):
    """Invalid norm descriptor or vector (non-finite, zero where forbidden)."""


class DimensionError(NormError):
    """Vector / norm dimensions disagree, or the operation needs another dimension."""


class DegenerateBallError(NormError):
    """Polygon vertices do not span a unit ball with the origin strictly inside."""


class SpecParseError(ValueError):
    """Malformed norm-spec or configuration file."""


class PreconditionError(ValueError):
    """An operation's hypothesis does not hold for the given input."""


class ComputationError(RuntimeError):
    """A numerical procedure failed to produce a trustworthy answer."""
