"""Exception types shared across the library."""


class LeitmotifError(Exception):
    """Base class for all library errors."""


class ParameterError(LeitmotifError, ValueError):
    """An argument violates a documented precondition."""


class CapacityError(LeitmotifError, RuntimeError):
    """A computation would exceed a configured memory or evaluation budget."""

    def __init__(self, message, required_bytes=None):
        super().__init__(message)
        self.required_bytes = required_bytes


class InputFormatError(LeitmotifError, ValueError):
    """An input file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class MissingDistanceError(LeitmotifError, KeyError):
    """A sparse-store lookup asked for a pair that was never memorized.

    This always indicates a bookkeeping bug in the first pass; the store
    never silently recomputes the missing value.
    """
