"""Exception hierarchy for the n-mean engine."""


class MeanError(Exception):
    """Base class for all errors raised by :mod:`nmeans`."""


class DimensionError(MeanError, ValueError):
    """Arity or shape mismatch between a mean and its arguments."""


class ParameterError(MeanError, ValueError):
    """A mean or routine was configured with an out-of-range parameter."""


class ValidationError(MeanError, ValueError):
    """An input element does not belong to the space (e.g. not SPD)."""


class ParseError(MeanError, ValueError):
    """Malformed input text."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConvergenceError(MeanError, RuntimeError):
    """An iteration hit ``max_iter`` before reaching its tolerance.

    The partial state is attached so callers can inspect how far it got.
    """

    def __init__(self, message, report=None, last=None, residual=None):
        super().__init__(message)
        self.report = report
        self.last = last
        self.residual = residual
