"""Exception and warning classes used across the package."""


class TerrainError(Exception):
    """Base class for all domain errors raised by agriterrain."""


class InvalidArgumentError(TerrainError, ValueError):
    pass


class LogParseError(TerrainError, ValueError):
    """A sensor log record could not be parsed.

    Parameters
    ----------
    line : int
        1-based line number of the offending record.
    message : str
        Human readable description.
    """

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class EmptySeriesError(TerrainError, ValueError):
    pass


class EmptyPatchError(TerrainError, ValueError):
    pass


class MissingModalityError(TerrainError, ValueError):
    pass


class DegeneratePatchError(TerrainError, ValueError):
    pass


class RankDeficientError(DegeneratePatchError):
    pass


class InvalidLoadError(TerrainError, ValueError):
    pass


class InvalidKinematicsError(TerrainError, ValueError):
    pass


class EmptyWindowError(TerrainError, ValueError):
    pass


class MissingDataError(TerrainError, ValueError):
    """A sensor stream does not cover the requested window."""

    def __init__(self, stream, message):
        self.stream = stream
        super().__init__(f"{stream}: {message}")


class StabilityError(TerrainError, ValueError):
    pass


class OutOfProfileError(TerrainError, ValueError):
    pass


class CalibrationError(TerrainError, RuntimeError):
    pass


class DegenerateLabelsError(TerrainError, ValueError):
    pass


class InsufficientClassDataError(TerrainError, ValueError):
    pass


class ShapeError(TerrainError, ValueError):
    pass


class InvalidKError(TerrainError, ValueError):
    pass


class TerrainWarning(UserWarning):
    pass


class TipOverWarning(TerrainWarning):
    pass


class SlipRangeWarning(TerrainWarning):
    pass


class EmptyGroundWarning(TerrainWarning):
    pass


class DroppedPatchWarning(TerrainWarning):
    pass
