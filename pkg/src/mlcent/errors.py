"""Exception and warning types shared across the package."""


class MLError(Exception):
    """Base class for all mlcent errors."""


class MLDomainError(MLError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class GammaPoleError(MLDomainError):
    """The Gamma function was evaluated at a non-positive integer."""


class MLOverflowError(MLError, OverflowError):
    """A computed quantity exceeds the largest representable double."""


class MLConvergenceError(MLError, RuntimeError):
    """An iterative method failed to reach the requested tolerance."""


class MatrixLogBranchError(MLDomainError):
    """The principal matrix logarithm does not exist (eigenvalue on the
    closed negative real axis)."""


class ParseError(MLError, ValueError):
    """Malformed graph or schedule input."""


class AdmissibilityWarning(UserWarning):
    """The requested (alpha, gamma) pair violates the admissibility bound."""


class DisconnectedGraphWarning(UserWarning):
    """The graph is disconnected; the result is restricted to the largest
    connected component."""
