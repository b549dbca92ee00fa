"""
Error Hierarchy
Every failure raised by the toolkit derives from RoboTradingError and carries
the process exit code the command line reports for it.
"""

from typing import Optional

import config


class RoboTradingError(Exception):
    """Base class for toolkit errors"""
    exit_code = config.EXIT_UNEXPECTED


# ============================================================================
# DATA ERRORS (exit 2)
# ============================================================================

class DataError(RoboTradingError):
    exit_code = config.EXIT_DATA_ERROR


class ConfigError(DataError):
    """Run configuration is missing, malformed or inconsistent"""


class MissingFileError(DataError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"File not found: {path}")


class RowError(DataError):
    """Problem tied to one line of a candle file"""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class MalformedRowError(RowError):
    pass


class NonMonotonicTimestampError(RowError):
    pass


class InvariantViolationError(RowError):
    pass


class SeriesTooShortError(DataError):
    pass


# ============================================================================
# PARAMETER ERRORS (exit 2)
# ============================================================================

class ParameterError(RoboTradingError, ValueError):
    exit_code = config.EXIT_DATA_ERROR


class WindowExceedsSeriesError(ParameterError):
    def __init__(self, window: int, length: int):
        self.window = window
        self.length = length
        super().__init__(f"window {window} exceeds series length {length}")


class InvalidWindowOrderError(ParameterError):
    pass


class InvalidParameterError(ParameterError):
    pass


class ThresholdOrderViolationError(ParameterError):
    pass


class BandOrderViolationError(ParameterError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"upper band below lower band at index {index}")


class LengthMismatchError(ParameterError):
    pass


class DimensionMismatchError(ParameterError):
    pass


class EmptyGridError(ParameterError):
    pass


class BadPopulationSizeError(ParameterError):
    pass


# ============================================================================
# ARTIFACT ERRORS (exit 3)
# ============================================================================

class MissingArtifactsError(RoboTradingError):
    exit_code = config.EXIT_MISSING_ARTIFACTS


# ============================================================================
# NUMERIC FAILURES (exit 4)
# ============================================================================

class NumericError(RoboTradingError):
    exit_code = config.EXIT_NUMERIC_FAILURE


class TooFewDaysError(NumericError):
    pass


class ZeroVolatilityError(NumericError):
    pass


class AccountBlownError(NumericError):
    """Balance wiped out; ``partial`` holds the result up to the halt index"""

    def __init__(self, halt_index: int, partial: Optional[object] = None):
        self.halt_index = halt_index
        self.partial = partial
        super().__init__(f"account blown at bar {halt_index}")
