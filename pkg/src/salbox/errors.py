"""Exception types shared across the package."""


class PipelineError(Exception):
    """Base class for errors raised by this package."""


class MapFormatError(PipelineError):
    """A map file is outside the supported NPY/PGM subset."""


class DataError(PipelineError):
    """An input file (CSV, map pair) is malformed or inconsistent."""


class NoRegionError(PipelineError):
    """No localizable region: the threshold mask has no foreground."""


class NoPositiveSampleError(PipelineError):
    """The query's patient has no other image with the requested disease."""


class InsufficientNegativesError(PipelineError):
    """Fewer eligible negatives than requested.

    Carries the number that was actually available so callers can decide
    whether to retry with a smaller k.
    """

    def __init__(self, requested: int, available: int):
        super().__init__(
            f"requested {requested} negative samples, only {available} available"
        )
        self.requested = requested
        self.available = available
