"""Fluctuation-dissipation prefactors and the field spectral density of a uniform medium.

Units: hbar = k_B = c = 1.  Temperatures are energies, so ``omega / (2 T)``
is dimensionless.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ThermalState:
    temperature: float = 0.0

    def __post_init__(self):
        if not self.temperature >= 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature!r}")


@dataclass(frozen=True)
class MediumPoint:
    """Complex permittivity of the medium and the separation ``R = |r - r'|``."""

    epsilon: complex
    R: float

    def __post_init__(self):
        if np.imag(self.epsilon) < 0:
            raise ValueError(f"epsilon must have Im >= 0, got {self.epsilon!r}")
        if not self.R >= 0:
            raise ValueError(f"R must be >= 0, got {self.R!r}")


ZERO_T = ThermalState(0.0)


def thermal_factor(omega, T: ThermalState = ZERO_T):
    """``coth(omega / 2T)``, equal to 1 at ``T = 0``.

    Evaluated as ``1 + 2 e^{-2x} / (1 - e^{-2x})`` with ``x = omega / 2T`` so
    that large ``x`` never overflows.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("thermal_factor requires omega > 0")
    if T.temperature == 0:
        return np.ones_like(omega)
    # a subnormal temperature sends x to inf, which correctly gives 1
    with np.errstate(over="ignore"):
        x = omega / (2.0 * T.temperature)
    em = np.exp(-2.0 * x)
    return 1.0 + 2.0 * em / (-np.expm1(-2.0 * x))


def current_correlator_prefactor(omega, T: ThermalState, im_eps):
    """Scalar weight ``(omega^2 / 2) coth(omega / 2T) Im eps`` of the current correlator."""
    im_eps = np.asarray(im_eps, dtype=float)
    if np.any(im_eps < 0):
        raise DomainError("im_eps must be >= 0 for a passive medium")
    omega = np.asarray(omega, dtype=float)
    return 0.5 * omega**2 * thermal_factor(omega, T) * im_eps


def decay_root(epsilon):
    """Square root of ``-epsilon`` on the branch with non-negative real part.

    For ``Im epsilon >= 0`` this is ``-i sqrt(epsilon)``.  It coincides with the
    principal root of ``-epsilon`` away from the cut and takes the
    ``Im epsilon -> 0+`` limit on it, so a real positive ``epsilon`` gives
    ``-i sqrt(epsilon)`` (an outgoing wave) rather than the ambiguous cut value.
    """
    return -1j * np.sqrt(np.asarray(epsilon, dtype=complex))


def field_spectral_density(point: MediumPoint, omega, T: ThermalState = ZERO_T):
    """Contracted electric-field spectral density ``<E(r).E(r')>_omega`` for ``R > 0``.

    ``2 coth(omega/2T) Im[(omega^2 / R) exp(-omega R sqrt(-eps))]``.  The
    contact term proportional to ``delta(R)`` is not representable as a
    number and is left out, so ``R = 0`` is rejected.
    """
    if not point.R > 0:
        raise DomainError("field_spectral_density requires R > 0 (contact term excluded)")
    omega = np.asarray(omega, dtype=float)
    R = point.R
    phase = np.exp(-omega * R * decay_root(point.epsilon))
    return 2.0 * thermal_factor(omega, T) * np.imag(omega**2 / R * phase)


def vacuum_spectral_density(omega, R):
    """Zero-temperature vacuum limit ``(2 omega^2 / R) sin(omega R)``."""
    omega = np.asarray(omega, dtype=float)
    return 2.0 * omega**2 / R * np.sin(omega * R)


@dataclass(frozen=True)
class LosslessTrace:
    """Densities at ``eps = 1 + i delta`` and their ``delta -> 0`` limit."""

    deltas: np.ndarray
    density: np.ndarray
    limit: float

    def errors(self) -> np.ndarray:
        return np.abs(self.density - self.limit)


def lossless_limit_trace(omega: float, R: float, deltas) -> LosslessTrace:
    """Follow the spectral density of ``eps = 1 + i delta`` as ``delta`` shrinks.

    The sequence approaches the vacuum value linearly in ``delta``.
    ``delta = 0`` is allowed and reproduces the vacuum value exactly.
    """
    deltas = np.asarray(deltas, dtype=float)
    if np.any(deltas < 0):
        raise DomainError("deltas must be non-negative")
    if np.any(np.diff(deltas) > 0):
        raise DomainError("deltas must be descending")
    density = np.array(
        [float(field_spectral_density(MediumPoint(1.0 + 1j * dl, R), omega)) for dl in deltas]
    )
    return LosslessTrace(deltas, density, float(vacuum_spectral_density(omega, R)))
