"""Exception types raised across the package."""


class FormatError(ValueError):
    """A serialized stream is malformed, truncated or corrupted."""


class InvalidThreshold(ValueError):
    """A threshold outside the open interval (0, 1) or not given exactly."""


class RangeError(IndexError):
    """A query range that is empty or falls outside [1, n]."""


class ThresholdTooLow(ValueError):
    """A query threshold below the one the encoding was built for."""
