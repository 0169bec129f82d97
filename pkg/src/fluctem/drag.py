"""Lateral drag on a polarizable particle above a current-carrying plate.

The plate is a Drude conductor whose electrons drift with velocity ``v0``
along x while the lattice and the particle stay at rest.  Only the
fluctuations of the electron plasma are kept.  The force is

    F_x = (1/pi^2) int_0^inf dw alpha''(w) int dk_x dk_y
          [coth(w_-/2T_el) - coth(w/2T_p)] Im Gamma(w, k_x) q k_x exp(-2 q z0)

with ``w_- = w - k_x v0``, ``q = |k|`` and ``Gamma = (eps - 1)/(eps + 1)``
built from the longitudinal drift permittivity.  hbar = k_B = 1.

Sign convention: ``F_x > 0`` points along +x, i.e. along the drift velocity
of the electrons for ``v0 > 0``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad, trapezoid
from scipy.special import k0e, k1e

from .errors import ConvergenceError, DomainError, FitQualityError
from .materials import DriftParams, ParticleParams, particle_polarizability, surface_response

# k cutoff in units of 1/z0; exp(-2 q z0) q^5 is below 1e-10 of its peak there
K_CUTOFF = 20.0
# thermal cutoff in units of the largest temperature
T_CUTOFF = 40.0
# quadpack refuses relative tolerances below 50 machine epsilons
_EPSREL_FLOOR = 1e-13


@dataclass(frozen=True)
class DragConfig:
    """Plate, particle, separation and temperatures for a drag calculation.

    ``T_L`` (lattice temperature) is recorded for completeness; it does not
    enter the electron-plasma fluctuation model.
    """

    plate: DriftParams
    particle: ParticleParams
    z0: float
    T_el: float = 0.0
    T_p: float = 0.0
    T_L: Optional[float] = None

    def __post_init__(self):
        if not self.z0 > 0:
            raise ValueError(f"z0 must be > 0, got {self.z0!r}")
        for name in ("T_el", "T_p"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if self.T_L is not None and not self.T_L >= 0:
            raise ValueError(f"T_L must be >= 0, got {self.T_L!r}")
        if self.plate.v0[1] != 0 or self.plate.v0[2] != 0:
            raise ValueError("plate.v0 must point along x")
        eps_L = self.plate.drude.eps_L
        if callable(eps_L) or np.imag(eps_L) != 0:
            raise ValueError("eps_L must be a real constant for the drag model")

    @property
    def v0(self) -> float:
        return self.plate.v0x

    def with_v0(self, v0: float) -> "DragConfig":
        return replace(self, plate=DriftParams(self.plate.drude, (v0, 0.0, 0.0)))

    def with_z0(self, z0: float) -> "DragConfig":
        return replace(self, z0=z0)


@dataclass(frozen=True)
class DragResult:
    F_x: float
    abs_error_estimate: float
    evaluations: int


def kappa(cfg: DragConfig) -> float:
    """Dimensionless drift speed ``|v0| / (omega0 z0)``."""
    return abs(cfg.v0) / (cfg.particle.omega0 * cfg.z0)


def _coth_or_sign(x, T):
    """``coth(x / 2T)`` with the ``T = 0`` limit ``sign(x)``."""
    x = np.asarray(x, dtype=float)
    if T == 0:
        return np.sign(x)
    with np.errstate(divide="ignore", over="ignore"):
        return 1.0 / np.tanh(x / (2.0 * T))


def thermal_bracket(omega, w_minus, T_el: float, T_p: float):
    """``coth(w_-/2T_el) - coth(w/2T_p)`` with zero temperatures taken as signs."""
    return _coth_or_sign(w_minus, T_el) - _coth_or_sign(omega, T_p)


def drag_integrand(omega, k_x, k_y, cfg: DragConfig):
    """Integrand of the drag force at ``(omega, k_x, k_y)``, before the ``1/pi^2``.

    Raises :class:`~fluctem.errors.PoleError` at ``omega = k_x v0``, where the
    longitudinal permittivity has its real pole.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("drag_integrand requires omega > 0")
    k_x = np.asarray(k_x, dtype=float)
    q = np.hypot(k_x, k_y)
    alpha2 = np.imag(particle_polarizability(omega, cfg.particle))
    im_gamma = np.imag(surface_response(omega, k_x, cfg.plate))
    bracket = thermal_bracket(omega, omega - k_x * cfg.v0, cfg.T_el, cfg.T_p)
    return alpha2 * bracket * im_gamma * q * k_x * np.exp(-2.0 * q * cfg.z0)


def ky_integral(k_x, z0: float):
    """``int dk_y q exp(-2 q z0)`` over the real line, ``q = sqrt(k_x^2 + k_y^2)``.

    Equals ``2 k_x^2 [K0(2 z0 k_x) + K1(2 z0 k_x) / (2 z0 k_x)]`` and tends to
    ``1 / (2 z0^2)`` as ``k_x -> 0``.
    """
    k = np.abs(np.asarray(k_x, dtype=float))
    x = 2.0 * z0 * k
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 2.0 * k * k * np.exp(-x) * (k0e(x) + k1e(x) / x)
    return np.where(x < 1e-12, 1.0 / (2.0 * z0 * z0), val)


def ky_integral_quad(k_x: float, z0: float) -> float:
    """Same as :func:`ky_integral`, by adaptive quadrature."""
    kx = abs(k_x)

    def f(ky):
        q = math.hypot(kx, ky)
        return q * math.exp(-2.0 * q * z0)

    val, _ = quad(f, 0.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return 2.0 * val


class _Kernel:
    """Scalar pieces of the integrand, written for speed inside nested quad."""

    def __init__(self, cfg: DragConfig, ky_method: str):
        d = cfg.plate.drude
        self.wp2 = d.omega_p**2
        self.gamma = d.gamma
        self.eps_L = float(np.real(d.eps_L))
        self.v0 = cfg.v0
        self.z0 = cfg.z0
        self.T_el = cfg.T_el
        self.T_p = cfg.T_p
        p = cfg.particle
        self.a0w02 = p.alpha0 * p.omega0**2
        self.w02 = p.omega0**2
        self.eta = p.eta
        if ky_method == "bessel":
            self.Q = lambda kx: float(ky_integral(kx, self.z0))
        elif ky_method == "quad":
            self.Q = lambda kx: ky_integral_quad(kx, self.z0)
        else:
            raise ValueError(f"unknown ky_method {ky_method!r}")
        self.calls = 0

    def alpha2(self, w):
        den = (self.w02 - w * w) ** 2 + (w * self.eta) ** 2
        return self.a0w02 * w * self.eta / den

    def im_gamma(self, w_minus):
        # Gamma rewritten with D = w_-(w_- + i gamma) so that w_- = 0 is regular
        D = w_minus * complex(w_minus, self.gamma)
        num = (self.eps_L - 1.0) * D - self.wp2
        den = (self.eps_L + 1.0) * D - self.wp2
        return (num / den).imag

    def coth(self, x, T):
        if T == 0:
            return math.copysign(1.0, x) if x != 0 else 0.0
        y = x / (2.0 * T)
        if abs(y) > 20.0:
            return math.copysign(1.0 + 2.0 * math.exp(-2.0 * abs(y)), y)
        return 1.0 / math.tanh(y)

    def f(self, w, kx):
        """Integrand after the k_y integration, without alpha''."""
        self.calls += 1
        wm = w - kx * self.v0
        br = self.coth(wm, self.T_el) - self.coth(w, self.T_p)
        if br == 0.0:
            return 0.0
        return br * self.im_gamma(wm) * kx * self.Q(kx)

    def resonance_shift(self):
        """``|Re w_-|`` where ``eps(w, k_x) = -1``; ``None`` if there is none."""
        if self.eps_L + 1.0 <= 0:
            return None
        ws2 = self.wp2 / (self.eps_L + 1.0)
        disc = ws2 - 0.25 * self.gamma**2
        return math.sqrt(disc) if disc > 0 else None


def _kx_points(kern: _Kernel, w: float, lo: float, hi: float):
    v = abs(kern.v0)
    pts = [w / v]
    ws = kern.resonance_shift()
    if ws is not None:
        width = max(kern.gamma, 1e-300) / v
        for centre in ((w + ws) / v, abs(w - ws) / v):
            pts.append(centre)
            for m in (1.0, 5.0, 25.0):
                pts.extend((centre - m * width, centre + m * width))
    return sorted({p for p in pts if lo < p < hi})


def _inner(kern: _Kernel, w: float, kmax: float, epsrel: float):
    v = kern.v0
    zero_T = kern.T_el == 0 and kern.T_p == 0
    if v == 0:
        if kern.T_el == kern.T_p:
            return 0.0, 0.0
        lo = 0.0
    else:
        lo = w / abs(v) if zero_T else 0.0
    if lo >= kmax:
        return 0.0, 0.0

    def g(kx):
        # the two signs of k_x together; at v0 = 0 they cancel exactly
        return kern.f(w, kx) + kern.f(w, -kx)

    pts = _kx_points(kern, w, lo, kmax) if v != 0 else []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(g, lo, kmax, points=pts or None, epsabs=0.0, epsrel=epsrel, limit=400)
    return val, err


def drag_force(cfg: DragConfig, tol: float = 1e-6, ky_method: str = "bessel") -> DragResult:
    """Drag force ``F_x`` on the particle by nested adaptive quadrature.

    The ``k_y`` integral is done in closed form (``ky_method="bessel"``) or by
    quadrature (``"quad"``).  The ``k_x`` integration is split at the
    Doppler pole ``k_x = omega / v0`` and around the surface-plasmon
    resonance loci ``eps(omega, k_x) = -1``; the ``omega`` integration is
    split around the particle resonance.

    Parameters
    ----------
    cfg : DragConfig
    tol : float
        Relative tolerance for the result.  The outer integration is asked
        for ``tol / 2`` and the inner ones for ``tol / 10``, leaving room for
        the propagated inner errors.

    Returns
    -------
    DragResult

    Raises
    ------
    ConvergenceError
        If the error estimate stays above ``tol * |F_x|``.
    """
    if not tol > 0:
        raise DomainError("tol must be > 0")
    kern = _Kernel(cfg, ky_method)
    if cfg.v0 == 0 and cfg.T_el == cfg.T_p:
        return DragResult(0.0, 0.0, 0)

    kmax = K_CUTOFF / cfg.z0
    w_max = kmax * abs(cfg.v0) + T_CUTOFF * max(cfg.T_el, cfg.T_p)
    p = cfg.particle
    inner_errs = {}

    def outer(w):
        val, err = _inner(kern, w, kmax, max(0.1 * tol, _EPSREL_FLOOR))
        a2 = kern.alpha2(w)
        inner_errs[w] = a2 * err
        return a2 * val

    cand = [p.omega0 + s * m * p.eta for m in (0.0, 1.0, 5.0) for s in (-1.0, 1.0)]
    ws = kern.resonance_shift()
    if ws is not None:
        cand.append(ws)
    pts = sorted({c for c in cand if 0 < c < w_max})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(
            outer, 0.0, w_max, points=pts or None, epsabs=0.0, epsrel=max(0.5 * tol, _EPSREL_FLOOR), limit=400
        )

    if inner_errs:
        ws_sorted = np.array(sorted(inner_errs))
        errs = np.array([inner_errs[w] for w in ws_sorted])
        err += float(trapezoid(errs, ws_sorted)) if ws_sorted.size > 1 else 0.0
    F = val / math.pi**2
    E = err / math.pi**2
    if E > tol * abs(F) and E > 0:
        raise ConvergenceError(f"drag quadrature error estimate {E:.3g} exceeds tol*|F| = {tol * abs(F):.3g}")
    return DragResult(F, E, kern.calls)


@dataclass(frozen=True)
class AsymptoticFit:
    """Log-log exponents of ``F_x(v0)`` in the slow and fast drift regimes."""

    p_small: float
    p_large: float
    r2_small: float
    r2_large: float
    v0: np.ndarray = field(repr=False)
    kappa: np.ndarray = field(repr=False)
    F_x: np.ndarray = field(repr=False)


def _loglog_fit(x, y):
    lx, ly = np.log(x), np.log(y)
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icpt)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(r2)


def drag_asymptotics(
    cfg_template: DragConfig,
    v0_values,
    small=(0.0, 0.1),
    large=(10.0, math.inf),
    tol: float = 1e-7,
    min_r2: float = 0.99,
) -> AsymptoticFit:
    """Fit ``F_x ~ v0^p`` separately for small and large ``kappa = v0/(omega0 z0)``.

    Points with ``kappa`` inside ``small`` (inclusive) feed the slow-drift fit,
    points inside ``large`` the fast-drift fit.  For quantum drag the
    expected exponents are +3 and -2.

    Raises
    ------
    DomainError
        If either temperature is non-zero or a regime has fewer than 3 points.
    FitQualityError
        If a fit has coefficient of determination below ``min_r2``.
    """
    if cfg_template.T_el != 0 or cfg_template.T_p != 0:
        raise DomainError("drag_asymptotics is defined for T_el = T_p = 0")
    v0 = np.asarray(sorted(v0_values), dtype=float)
    if np.any(v0 <= 0):
        raise DomainError("v0_values must be positive")
    kap = v0 / (cfg_template.particle.omega0 * cfg_template.z0)
    regimes = []
    for name, (lo, hi) in (("small", small), ("large", large)):
        sel = (kap >= lo) & (kap <= hi)
        if sel.sum() < 3:
            raise DomainError(f"need at least 3 v0 values in the {name}-kappa regime")
        regimes.append((name, sel))
    F = np.array([drag_force(cfg_template.with_v0(v), tol=tol).F_x for v in v0])

    fits = []
    for name, sel in regimes:
        if np.any(F[sel] <= 0):
            raise FitQualityError(f"non-positive forces in the {name}-kappa regime")
        slope, r2 = _loglog_fit(v0[sel], F[sel])
        if r2 < min_r2:
            raise FitQualityError(f"{name}-kappa fit has R^2 = {r2:.4f} < {min_r2}")
        fits.append((slope, r2))
    (ps, rs), (pl, rl) = fits
    return AsymptoticFit(ps, pl, rs, rl, v0, kap, F)
