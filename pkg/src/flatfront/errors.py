"""Exception hierarchy shared by all flatfront modules."""


class FlatFrontError(Exception):
    """Base class for every error raised by flatfront."""


class ParameterError(FlatFrontError, ValueError):
    """Inadmissible parameter triple or argument value."""


class PoleError(FlatFrontError, ValueError):
    """Evaluation requested at a pole."""


class DomainError(FlatFrontError, ValueError):
    """A formula was used outside the region where it is valid."""


class ConvergenceError(FlatFrontError, ArithmeticError):
    """An iterative or series method did not converge."""


class ClearanceError(FlatFrontError, ValueError):
    """A path comes too close to a puncture or an umbilic."""


class StepSizeError(FlatFrontError, ArithmeticError):
    """The adaptive integrator could not keep its error below tolerance."""


class UmbilicError(FlatFrontError, ValueError):
    """Quantity diverges at (or too near) a zero of q."""


class EmptyGridError(FlatFrontError, ValueError):
    """Every vertex of a domain grid was removed by the exclusion discs."""
