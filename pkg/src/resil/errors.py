"""Exception types shared across the package."""


class ResilError(Exception):
    """Base class for all package errors."""


class ValidationError(ResilError, ValueError):
    """Invalid model parameters or input data."""


class DomainError(ValidationError):
    """Argument outside the domain of a function."""


class ParseError(ValidationError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class VariantError(ResilError, TypeError):
    """Operation called on a restore model variant that does not support it."""


class ConvergenceError(ResilError, ArithmeticError):
    """Adaptive quadrature ran out of subdivisions.

    The best estimate and its error bound are kept on the exception so that
    callers can decide whether the partial answer is good enough.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error
