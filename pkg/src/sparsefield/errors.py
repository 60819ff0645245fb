"""Exception hierarchy shared across the package."""


class SparseFieldError(Exception):
    """Base class for all package errors."""


class ArgumentError(SparseFieldError, ValueError):
    """An argument violates an operation's preconditions."""


class ParseError(SparseFieldError):
    """A data file is malformed."""


class NumericalError(SparseFieldError):
    """Base class for numerical failures (singular systems, degenerate data)."""


class SingularityError(NumericalError):
    """A linear system is too ill-conditioned to solve reliably."""

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class DegeneracyError(NumericalError):
    """The data carries fewer independent directions than requested."""

    def __init__(self, message, effective_rank=0):
        super().__init__(message)
        self.effective_rank = effective_rank


class ConvergenceError(NumericalError):
    """An iterative kernel hit its iteration cap."""
