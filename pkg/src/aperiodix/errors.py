"""Exception types shared across the package."""


class AperiodixError(Exception):
    """Base class for all package errors."""


class NotPrimitive(AperiodixError):
    """Occurrence matrix has no strictly positive power."""


class LengthLimit(AperiodixError):
    """A generated word would exceed the configured length cap."""


class EmptyWord(AperiodixError):
    """Operation requires a nonempty word."""


class TooShort(AperiodixError):
    """Chain has too few atoms for the requested statistic."""


class SizeLimit(AperiodixError):
    """Matrix too large for the brute-force oracle."""


class UnknownFamily(AperiodixError):
    """Family name is not one of the built-ins."""


class Unrecognized(AperiodixError):
    """Group does not fall into the supported presentation kinds."""

    def __init__(self, message, generators=None):
        super().__init__(message)
        self.generators = generators


class NoFixedPoint(AperiodixError):
    """No power of the substitution admits a seeded fixed point."""


class IoError(AperiodixError):
    """Failed to write an output artifact."""
