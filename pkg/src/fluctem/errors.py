"""Exception types raised by the numerical routines."""


class FluctuationError(Exception):
    """Base class for all errors raised by fluctem."""


class DomainError(FluctuationError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class PoleError(DomainError):
    """Evaluation was requested exactly on a pole of a response function."""


class GridTooCoarseError(FluctuationError):
    """A quadrature grid does not resolve the integrand."""


class ConvergenceError(FluctuationError):
    """Adaptive quadrature did not reach the requested tolerance."""


class FitQualityError(FluctuationError):
    """A power-law fit is too poor to report an exponent."""


class SymmetryViolationError(FluctuationError):
    """An identity that must hold exactly was violated numerically."""


class GridCoverageWarning(UserWarning):
    """A wave-vector grid samples the unstable window too sparsely."""
