"""Fluctuational electrodynamics in and out of equilibrium.

Submodules
----------
materials   plasma, Drude and drifting-Drude permittivities, particle
            polarizability, Kramers-Kronig residuals
spectra     fluctuation-dissipation prefactors, field spectral density
friction    quantum friction between sheared plasmonic sheets
drag        current-induced drag on a particle above a biased plate
cli         CSV-producing command-line runner
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("fluctem")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    DomainError,
    FitQualityError,
    FluctuationError,
    GridCoverageWarning,
    GridTooCoarseError,
    PoleError,
    SymmetryViolationError,
)

__all__ = [
    "ConvergenceError",
    "DomainError",
    "FitQualityError",
    "FluctuationError",
    "GridCoverageWarning",
    "GridTooCoarseError",
    "PoleError",
    "SymmetryViolationError",
    "__version__",
]
