"""Dielectric and polarizability response models.

All quantities are dimensionless: frequencies are measured in a reference
frequency ``omega_ref`` and lengths in ``c / omega_ref`` (hbar = k_B = c = 1).

Functions accept scalars or numpy arrays and broadcast like ufuncs.  Formulas
that have a real-axis pole raise :class:`~fluctem.errors.PoleError` instead of
returning ``inf``/``nan``, so quadrature code has to route around the pole
explicitly.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, GridTooCoarseError, PoleError

LatticeResponse = Union[float, complex, Callable[[np.ndarray], np.ndarray]]

# sample frequencies used to sanity check a callable lattice response
_PROBE_FREQS = np.geomspace(1e-3, 1e3, 61)


def lattice_value(eps_L: LatticeResponse, omega):
    """Evaluate a lattice response that may be a constant or a callable."""
    if callable(eps_L):
        return eps_L(omega)
    return eps_L + 0.0 * np.asarray(omega)


@dataclass(frozen=True)
class PlasmaParams:
    """Lossless plasma model, parametrised by the plasma frequency."""

    omega_p: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError(f"omega_p must be > 0, got {self.omega_p!r}")


@dataclass(frozen=True)
class DrudeParams:
    """Drude metal: plasma frequency, relaxation rate and lattice response.

    ``eps_L`` is either a number or a callable of real frequency.  Its
    imaginary part must be non-negative for positive frequencies.
    """

    omega_p: float
    gamma: float = 0.0
    eps_L: LatticeResponse = 1.0

    def __post_init__(self):
        if not self.omega_p >= 0:
            raise ValueError(f"omega_p must be >= 0, got {self.omega_p!r}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma!r}")
        im = np.imag(lattice_value(self.eps_L, _PROBE_FREQS))
        if np.any(im < 0):
            raise ValueError("eps_L must satisfy Im eps_L(omega) >= 0 for omega > 0")


@dataclass(frozen=True)
class DriftParams:
    """Drude plate whose carriers drift with velocity ``v0`` (3-vector)."""

    drude: DrudeParams
    v0: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        v = np.asarray(self.v0, dtype=float)
        if isinstance(self.v0, numbers.Real):
            v = np.array([float(self.v0), 0.0, 0.0])
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise ValueError(f"v0 must be a finite 3-vector, got {self.v0!r}")
        object.__setattr__(self, "v0", tuple(float(x) for x in v))

    @property
    def v0x(self) -> float:
        return self.v0[0]


@dataclass(frozen=True)
class ParticleParams:
    """Lorentz-oscillator polarizability of a small particle."""

    alpha0: float
    omega0: float
    eta: float

    def __post_init__(self):
        for name in ("alpha0", "omega0", "eta"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")


def plasma_epsilon(omega, p: PlasmaParams):
    """Lossless plasma permittivity ``1 - omega_p**2 / omega**2``.

    Raises
    ------
    PoleError
        At ``omega == 0``, where the model has a double pole.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega == 0):
        raise PoleError("plasma model has a double pole at omega = 0")
    return 1.0 - p.omega_p**2 / omega**2


def drude_epsilon(omega, p: DrudeParams):
    """Drude permittivity ``eps_L(omega) - omega_p**2 / (omega (omega + i gamma))``.

    Parameters
    ----------
    omega : float or ndarray
        Positive real frequency.
    p : DrudeParams

    Returns
    -------
    complex or ndarray of complex
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("drude_epsilon requires omega > 0")
    return lattice_value(p.eps_L, omega) - p.omega_p**2 / (omega * (omega + 1j * p.gamma))


def drift_epsilon_tensor(omega: float, k, p: DriftParams) -> np.ndarray:
    """Permittivity tensor of a Drude plasma with drifting carriers.

    ``eps_ik = eps_L delta_ik - A (delta_ik + v0_i k_k / w_minus)`` with
    ``A = omega_p**2 / (omega (w_minus + i gamma))`` and
    ``w_minus = omega - k . v0``.
    """
    k = np.asarray(k, dtype=float)
    v0 = np.asarray(p.v0)
    w_minus = omega - k @ v0
    if omega == 0:
        raise PoleError("drift tensor has a pole at omega = 0")
    if w_minus == 0:
        raise PoleError("drift tensor has a pole at omega - k.v0 = 0")
    d = p.drude
    amp = d.omega_p**2 / (omega * (w_minus + 1j * d.gamma))
    eye = np.eye(3)
    return lattice_value(d.eps_L, omega) * eye - amp * (eye + np.outer(v0, k) / w_minus)


def drift_epsilon_longitudinal(omega, k_dot_v0, p: DriftParams):
    """Longitudinal permittivity at the Doppler-shifted frequency.

    Returns ``eps_L(omega) - omega_p**2 / ((w_minus + i gamma) w_minus)`` where
    ``w_minus = omega - k_dot_v0``.  The real pole at ``w_minus = 0`` survives
    any finite ``gamma`` and is reported as :class:`PoleError`.
    """
    omega = np.asarray(omega, dtype=float)
    w_minus = omega - np.asarray(k_dot_v0, dtype=float)
    if np.any(w_minus == 0):
        raise PoleError("longitudinal drift permittivity has a pole at omega - k.v0 = 0")
    d = p.drude
    return lattice_value(d.eps_L, omega) - d.omega_p**2 / ((w_minus + 1j * d.gamma) * w_minus)


def particle_polarizability(omega, p: ParticleParams):
    """Lorentzian polarizability ``alpha0 omega0**2 / (omega0**2 - omega**2 - i omega eta)``."""
    omega = np.asarray(omega, dtype=float)
    w0sq = p.omega0**2
    return p.alpha0 * w0sq / (w0sq - omega**2 - 1j * omega * p.eta)


def reflection_factor(eps):
    """Quasi-static surface response ``(eps - 1) / (eps + 1)``."""
    eps = np.asarray(eps, dtype=complex)
    if np.any(eps == -1):
        raise PoleError("surface response has a pole at eps = -1")
    return (eps - 1) / (eps + 1)


def surface_response(omega, k_x, p: DriftParams):
    """Surface response of the drifting plate for in-plane wave number ``k_x``.

    The drift is taken along x, so the Doppler shift is ``k_x * v0_x``.
    """
    eps = drift_epsilon_longitudinal(omega, np.asarray(k_x, dtype=float) * p.v0x, p)
    return reflection_factor(eps)


def kk_grid(omega_max: float, n: int = 4001, omega_min: float = 1e-4) -> np.ndarray:
    """Log-spaced positive frequency grid suitable for :func:`kk_residual`."""
    return np.geomspace(omega_min, omega_max, n)


def _kk_integral(model, grid: np.ndarray, omega_test: float) -> float:
    """(2/pi) P int_0^Omega w Im eps(w) / (w^2 - w_t^2) dw with the pole subtracted."""
    wt = omega_test
    f = grid * np.imag(model(grid))
    ft = wt * np.imag(model(wt))
    denom = grid**2 - wt**2
    near = np.abs(grid - wt) <= 1e-8 * wt
    with np.errstate(divide="ignore", invalid="ignore"):
        g = (f - ft) / denom
    if np.any(near):
        h = 1e-5 * wt
        fp = ((wt + h) * np.imag(model(wt + h)) - (wt - h) * np.imag(model(wt - h))) / (2 * h)
        g[near] = fp / (2 * wt)
    omega_hi = grid[-1]
    regular = simpson(g, x=grid) + g[0] * grid[0]
    singular = ft * np.log(abs((omega_hi - wt) / (omega_hi + wt))) / (2 * wt)
    return 2.0 / np.pi * (regular + singular)


def kk_residual(model, omega_grid, omega_test: float, check: bool = True) -> float:
    """Violation of the Kramers-Kronig relation for ``Re eps`` at ``omega_test``.

    Computes ``|Re eps(w_t) - 1 - (2/pi) P int_0^Omega w Im eps(w)/(w^2 - w_t^2) dw|``
    on the supplied grid.  The principal value is handled by subtracting
    ``f(w_t) / (w^2 - w_t^2)`` from the integrand and adding its integral in
    closed form, which leaves a regular integrand.

    Parameters
    ----------
    model : callable
        Complex permittivity as a function of real frequency (vectorised).
    omega_grid : array_like
        Ascending positive frequencies; the last entry is the cutoff Omega.
    omega_test : float
        Frequency at which the relation is tested, inside the grid.
    check : bool
        If true, the grid is refined by inserting midpoints and the
        refined residual is returned.  A change larger than 10% of the
        magnitude of the terms being compared raises
        :class:`GridTooCoarseError`.

    Returns
    -------
    float
        Small (discretisation error only) for causal lossy models;
        ``omega_p**2 / omega_test**2`` for the lossless plasma model.
    """
    grid = np.asarray(omega_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3 or grid[0] <= 0 or np.any(np.diff(grid) <= 0):
        raise DomainError("omega_grid must be an ascending array of positive frequencies")
    if not grid[0] < omega_test < grid[-1]:
        raise DomainError("omega_test must lie strictly inside omega_grid")

    re_term = float(np.real(model(omega_test))) - 1.0
    kk = _kk_integral(model, grid, omega_test)
    residual = abs(re_term - kk)
    if not check:
        return residual

    fine = np.empty(2 * grid.size - 1)
    fine[0::2] = grid
    fine[1::2] = 0.5 * (grid[1:] + grid[:-1])
    kk_fine = _kk_integral(model, fine, omega_test)
    residual_fine = abs(re_term - kk_fine)
    scale = max(abs(re_term), abs(kk_fine), np.finfo(float).tiny)
    if abs(residual_fine - residual) > 0.1 * scale:
        raise GridTooCoarseError(
            f"refining the grid changed the KK residual from {residual:.3g} "
            f"to {residual_fine:.3g}"
        )
    return residual_fine
