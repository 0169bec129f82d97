"""Nonperturbative quantum friction between two sheared plasmonic sheets.

Each pair of wave vectors ``(k, -k)`` couples the plasmon operators of the
two sheets through a constant, non-Hermitian 4x4 matrix ``M`` acting on
``(b_k1, b_k2, b_{-k}1^dag, b_{-k}2^dag)``.  Inside a narrow window of
``k.v`` one eigenvalue pair turns purely imaginary and the number of
quanta grows exponentially; outside it the dynamics stays bounded.

Units: hbar = 1, frequencies in ``omega_ref``, lengths in ``c/omega_ref``.
The shear velocity is along x, so ``k.v = k_x v``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, GridCoverageWarning, SymmetryViolationError

# S is considered ill-conditioned (exceptional point nearby) above this
COND_LIMIT = 1e5


@dataclass(frozen=True)
class ShearSystem:
    """Two identical sheets at gap ``d`` sheared with speed ``v`` along x."""

    omega_sp: float
    d: float
    v: float = 0.0

    def __post_init__(self):
        if not self.omega_sp > 0:
            raise ValueError(f"omega_sp must be > 0, got {self.omega_sp!r}")
        if not self.d > 0:
            raise ValueError(f"d must be > 0, got {self.d!r}")
        if not self.v >= 0:
            raise ValueError(f"v must be >= 0, got {self.v!r}")

    @classmethod
    def from_plasma_frequency(cls, omega_p: float, d: float, v: float = 0.0) -> "ShearSystem":
        return cls(omega_p / math.sqrt(2.0), d, v)

    def coupling(self, k: "WaveVector") -> float:
        """Dimensionless coupling ``exp(-|k| d)``."""
        return math.exp(-k.k_par * self.d)

    def peak_wave_vector(self) -> "WaveVector":
        """The channel with the largest growth rate, ``k = (2 omega_sp / v, 0)``."""
        if self.v == 0:
            raise DomainError("no unstable channel at v = 0")
        return WaveVector(2.0 * self.omega_sp / self.v, 0.0)


@dataclass(frozen=True)
class WaveVector:
    k_x: float
    k_y: float = 0.0

    @property
    def k_par(self) -> float:
        return math.hypot(self.k_x, self.k_y)

    def __neg__(self) -> "WaveVector":
        return WaveVector(-self.k_x, -self.k_y)


def mode_matrix(sys: ShearSystem, k: WaveVector) -> np.ndarray:
    """Generator ``M`` of ``i d/dt (b_k1, b_k2, b_-k1^dag, b_-k2^dag) = M (...)``."""
    w = sys.omega_sp
    g = 0.5 * w * sys.coupling(k)
    h = 0.5 * k.k_x * sys.v
    return np.array(
        [
            [w - h, g, 0.0, g],
            [g, w + h, g, 0.0],
            [0.0, -g, -(w + h), -g],
            [-g, 0.0, -g, -(w - h)],
        ],
        dtype=complex,
    )


def _radicands(sys: ShearSystem, k: WaveVector):
    w = sys.omega_sp
    kv = k.k_x * sys.v
    c = sys.coupling(k)
    base = w * w + 0.25 * kv * kv
    split = w * w * math.sqrt(c * c + (kv / w) ** 2)
    return base + split, base - split


def eigenvalues_closed_form(sys: ShearSystem, k: WaveVector) -> np.ndarray:
    """The four eigenvalues ``(w_+, w_-, -w_-, -w_+)`` of :func:`mode_matrix`.

    ``w_-`` uses the principal complex square root, so inside the unstable
    window it is ``+i`` times the growth rate.
    """
    r_plus, r_minus = _radicands(sys, k)
    w_plus = math.sqrt(r_plus)
    w_minus = np.sqrt(complex(r_minus))
    return np.array([w_plus, w_minus, -w_minus, -w_plus], dtype=complex)


@dataclass(frozen=True)
class Window:
    """Open interval of ``|k.v| / omega_sp`` values that are unstable."""

    lo: float
    hi: float

    def __contains__(self, x) -> bool:
        return self.lo < abs(x) < self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo


def instability_window(sys: ShearSystem, k_par: float, direction=(1.0, 0.0), exact: bool = False):
    """Unstable range of ``|k.v| / omega_sp`` at fixed ``|k| = k_par``.

    The weak-coupling form is ``(2 - c, 2 + c)`` with ``c = exp(-k_par d)``.
    With ``exact=True`` the window is where the ``w_-`` radicand is
    negative, ``(2 sqrt(1 - c), 2 sqrt(1 + c))``; the two agree to ``O(c^2)``.

    Returns ``None`` when no wave vector along ``direction`` can be unstable
    (``v = 0`` or a direction perpendicular to the shear).
    """
    ux, uy = direction
    norm = math.hypot(ux, uy)
    if norm == 0:
        raise DomainError("direction must be non-zero")
    if sys.v == 0 or ux == 0:
        return None
    c = math.exp(-k_par * sys.d)
    if exact:
        return Window(2.0 * math.sqrt(max(1.0 - c, 0.0)), 2.0 * math.sqrt(1.0 + c))
    return Window(2.0 - c, 2.0 + c)


def unstable_kx_interval(sys: ShearSystem, k_y: float = 0.0):
    """Exact ``k_x > 0`` interval where ``w_-`` is complex, at fixed ``k_y``.

    The coupling depends on ``k_x`` through ``|k|``, so the edges are found
    by root-finding on the ``w_-`` radicand.  Returns ``None`` if the
    interval is empty.
    """
    if sys.v == 0:
        return None
    w, v = sys.omega_sp, sys.v

    def radicand(kx):
        return _radicands(sys, WaveVector(kx, k_y))[1]

    k0 = 2.0 * w / v
    if radicand(k0) >= 0:
        return None
    # k = 0 is a trivial root when k_y = 0 (coupling 1), so bracket from inside
    a = next((k0 * f for f in (0.9, 0.7, 0.5, 0.3, 0.1, 1e-3, 1e-6) if radicand(k0 * f) > 0), None)
    if a is None:
        raise DomainError("could not bracket the lower edge of the unstable window")
    # the upper edge lies below 2 sqrt(2) omega_sp / v since the coupling is <= 1
    rtol = 4 * np.finfo(float).eps
    lo = brentq(radicand, a, k0, xtol=1e-15, rtol=rtol)
    hi = brentq(radicand, k0, 2.0 * math.sqrt(2.0) * w / v, xtol=1e-15, rtol=rtol)
    return lo, hi


def is_unstable(sys: ShearSystem, k: WaveVector) -> bool:
    return _radicands(sys, k)[1] < 0


def growth_rate(sys: ShearSystem, k: WaveVector, exact: bool = False) -> float:
    """Imaginary part of ``w_-`` (zero outside the unstable window).

    The default is the weak-coupling expression
    ``(omega_sp/2) c sqrt(1 - ((|k_x| - 2 omega_sp/v) / (c omega_sp / v))^2)``;
    ``exact=True`` returns ``Im w_-`` from the closed-form eigenvalues.
    """
    if sys.v == 0:
        return 0.0
    if exact:
        r_minus = _radicands(sys, k)[1]
        return math.sqrt(-r_minus) if r_minus < 0 else 0.0
    w = sys.omega_sp
    c = sys.coupling(k)
    x = (abs(k.k_x) - 2.0 * w / sys.v) / (w / sys.v * c)
    if abs(x) >= 1.0:
        return 0.0
    return 0.5 * w * c * math.sqrt(1.0 - x * x)


def _null_vectors(A: np.ndarray, count: int) -> np.ndarray:
    _, _, vh = np.linalg.svd(A)
    return vh[-count:].conj().T


@dataclass
class ModeEvolution:
    """Eigen-structure of ``M`` for one wave vector, with ``U(t) = exp(-i t M)``.

    ``S`` holds the eigenvectors as columns, ordered like ``eigenvalues``.
    When ``S`` is ill-conditioned (close to an exceptional point at a window
    edge) :meth:`U` switches to a direct matrix exponential.
    """

    system: ShearSystem
    k: WaveVector
    M: np.ndarray
    eigenvalues: np.ndarray
    S: np.ndarray
    condition: float
    growth_rate: float
    tau: Optional[float]

    @property
    def diagonalizable(self) -> bool:
        return self.condition < COND_LIMIT

    def U(self, t: float, method: str = "auto") -> np.ndarray:
        if t < 0:
            raise DomainError("evolution is only defined for t >= 0")
        if method == "auto":
            method = "eig" if self.diagonalizable else "expm"
        if method == "expm":
            return scipy.linalg.expm(-1j * t * self.M)
        if method != "eig":
            raise ValueError(f"unknown method {method!r}")
        if t == 0:
            return np.eye(4, dtype=complex)
        phases = np.exp(-1j * self.eigenvalues * t)
        return (self.S * phases) @ self._S_inv

    def U_many(self, times) -> np.ndarray:
        """Stack of ``U(t)`` for an array of times, shape ``(n, 4, 4)``."""
        times = np.asarray(times, dtype=float)
        if np.any(times < 0):
            raise DomainError("evolution is only defined for t >= 0")
        if not self.diagonalizable:
            return np.array([scipy.linalg.expm(-1j * t * self.M) for t in times])
        phases = np.exp(-1j * np.outer(times, self.eigenvalues))
        U = np.einsum("ij,tj,jk->tik", self.S, phases, self._S_inv)
        U[times == 0] = np.eye(4)
        return U

    def __post_init__(self):
        self._S_inv = None
        if self.diagonalizable:
            self._S_inv = np.linalg.inv(self.S)


def mode_evolution(sys: ShearSystem, k: WaveVector) -> ModeEvolution:
    """Diagonalise ``M`` using the closed-form eigenvalues.

    Eigenvectors are null vectors of ``M - w I``; repeated eigenvalues take
    as many null vectors as their multiplicity.
    """
    M = mode_matrix(sys, k)
    lam = eigenvalues_closed_form(sys, k)
    scale = max(abs(lam).max(), sys.omega_sp)
    S = np.empty((4, 4), dtype=complex)
    done = np.zeros(4, dtype=bool)
    for i in range(4):
        if done[i]:
            continue
        group = [j for j in range(4) if not done[j] and abs(lam[j] - lam[i]) <= 1e-12 * scale]
        vecs = _null_vectors(M - lam[i] * np.eye(4), len(group))
        for col, j in enumerate(group):
            S[:, j] = vecs[:, col]
            done[j] = True
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(S))
    # at an exceptional point the SVD hands back a vector that is not in the
    # null space; such an S is useless however well conditioned it looks
    residual = np.abs(M @ S - S * lam).max()
    if not np.isfinite(cond) or residual > 1e-8 * scale:
        cond = math.inf
    rate = max(float(lam[1].imag), 0.0)
    tau = 1.0 / (2.0 * rate) if rate > 0 else None
    return ModeEvolution(sys, k, M, lam, S, cond, rate, tau)


def evolution_operator(sys: ShearSystem, k: WaveVector, t: float, method: str = "auto") -> np.ndarray:
    """``U(t) = S diag(exp(-i w_j t)) S^{-1} = exp(-i t M)``."""
    return mode_evolution(sys, k).U(t, method)


def _row_quanta(U: np.ndarray, row: int):
    return np.abs(U[..., row, 2]) ** 2 + np.abs(U[..., row, 3]) ** 2


def _row_quanta_rate(U: np.ndarray, M: np.ndarray, row: int):
    dU = -1j * np.einsum("ij,...jk->...ik", M, U)
    return sum(2.0 * np.real(np.conj(U[..., row, j]) * dU[..., row, j]) for j in (2, 3))


@dataclass(frozen=True)
class QuantaTrace:
    times: np.ndarray
    N: np.ndarray
    dNdt: np.ndarray


def _pair_quanta(sys: ShearSystem, k: WaveVector, times, rtol: float = 1e-8):
    """Quanta in sheet 1 for the ``(k, -k)`` pair, cross-checked against sheet 2."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    plus = mode_evolution(sys, k)
    minus = mode_evolution(sys, -k)
    Up = plus.U_many(times)
    Um = minus.U_many(times)
    n1 = _row_quanta(Up, 0) + _row_quanta(Um, 0)
    n2 = _row_quanta(Up, 1) + _row_quanta(Um, 1)
    bad = np.abs(n1 - n2) > rtol * np.maximum(1.0, n1) + 1e-12
    if np.any(bad):
        raise SymmetryViolationError(
            f"quanta in the two sheets differ: {n1[bad][0]!r} vs {n2[bad][0]!r}"
        )
    rate = _row_quanta_rate(Up, plus.M, 0) + _row_quanta_rate(Um, minus.M, 0)
    return n1, rate


def quanta_number(sys: ShearSystem, k: WaveVector, t: float) -> float:
    """Mean number of plasmons in sheet 1 for modes ``k`` and ``-k`` at time ``t``.

    Starts from the vacuum at ``t = 0``.  The same number computed for sheet 2
    must coincide; a mismatch raises :class:`SymmetryViolationError`.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    return float(_pair_quanta(sys, k, [t])[0][0])


def quanta_rate(sys: ShearSystem, k: WaveVector, t: float) -> float:
    """``dN/dt`` from ``dU/dt = -i M U`` (no finite differences)."""
    if t < 0:
        raise DomainError("t must be >= 0")
    return float(_pair_quanta(sys, k, [t])[1][0])


def quanta_trace(sys: ShearSystem, k: WaveVector, times) -> QuantaTrace:
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise DomainError("times must be ascending")
    if times.size and times[0] < 0:
        raise DomainError("times must be >= 0")
    N, rate = _pair_quanta(sys, k, times)
    return QuantaTrace(times, N, rate)


@dataclass(frozen=True)
class KGrid:
    """Uniform rectangular grid of wave vectors with ``k_x > 0``."""

    kx: np.ndarray
    ky: np.ndarray

    @property
    def cell(self) -> float:
        dkx = self.kx[1] - self.kx[0] if self.kx.size > 1 else 1.0
        dky = self.ky[1] - self.ky[0] if self.ky.size > 1 else 1.0
        return float(dkx * dky)

    def points(self):
        for kx in self.kx:
            for ky in self.ky:
                yield WaveVector(float(kx), float(ky))


def friction_grid(sys: ShearSystem, n_kx: int = 32, n_ky: int = 32, span: float = 1.5) -> KGrid:
    """Grid that brackets the unstable window.

    ``k_x`` runs uniformly over ``k0 -/+ span c0 omega_sp / v`` around
    ``k0 = 2 omega_sp / v`` (``c0`` is the coupling at ``k0``).  ``k_y`` is
    uniform and symmetric, cut off where ``exp(-2 |k| d)`` drops below 1e-6
    of its value at ``k0``.
    """
    if sys.v == 0:
        raise DomainError("friction grid needs v > 0")
    w = sys.omega_sp
    k0 = 2.0 * w / sys.v
    c0 = math.exp(-k0 * sys.d)
    half = span * c0 * w / sys.v
    kx = np.linspace(max(k0 - half, 0.0), k0 + half, n_kx)
    kx = kx[kx > 0]
    k_cut = k0 + math.log(1e6) / (2.0 * sys.d)
    ky_max = math.sqrt(k_cut**2 - k0**2)
    ky = np.linspace(-ky_max, ky_max, n_ky)
    return KGrid(kx, ky)


def _check_coverage(sys: ShearSystem, grid: KGrid, minimum: int = 16):
    if sys.v == 0:
        return
    ky0 = grid.ky[np.argmin(np.abs(grid.ky))]
    inside = sum(is_unstable(sys, WaveVector(float(kx), float(ky0))) for kx in grid.kx)
    if inside < minimum:
        warnings.warn(
            f"only {inside} k_x samples fall inside the unstable window (want >= {minimum})",
            GridCoverageWarning,
            stacklevel=3,
        )


def _grid_sums(sys: ShearSystem, grid: KGrid, times):
    times = np.atleast_1d(np.asarray(times, dtype=float))
    N = np.zeros_like(times)
    rate = np.zeros_like(times)
    for k in grid.points():
        if k.k_x <= 0:
            continue
        n, r = _pair_quanta(sys, k, times)
        N += n
        rate += r
    return N, rate


def max_growth_rate(sys: ShearSystem, grid: KGrid) -> float:
    """Largest exact growth rate among the grid points."""
    return max(growth_rate(sys, k, exact=True) for k in grid.points())


def total_energy(sys: ShearSystem, grid: KGrid, t, area: float = 1.0):
    """Energy of the generated quanta, ``sum 2 omega_sp N_k(t)`` over ``k_x > 0``.

    Each grid cell carries ``area dk_x dk_y / (2 pi)^2`` modes.
    """
    _check_coverage(sys, grid)
    N, _ = _grid_sums(sys, grid, t)
    E = 2.0 * sys.omega_sp * N * area * grid.cell / (2.0 * math.pi) ** 2
    return E if np.ndim(t) else float(E[0])


def friction_force(sys: ShearSystem, grid: KGrid, t, area: float = 1.0):
    """Friction force per unit area, ``(1/A) sum (2 omega_sp / v) dN_k/dt``.

    ``dN_k/dt`` is evaluated from ``dU/dt = -i M U``.  The force is defined
    as zero at ``v = 0``.  Each cell holds ``area dk / (2 pi)^2`` modes, so
    ``area`` cancels from the force per unit area.
    """
    if sys.v == 0:
        return np.zeros(np.shape(t)) if np.ndim(t) else 0.0
    _check_coverage(sys, grid)
    _, rate = _grid_sums(sys, grid, t)
    modes_per_area = grid.cell / (2.0 * math.pi) ** 2
    F = 2.0 * sys.omega_sp / sys.v * rate * modes_per_area
    return F if np.ndim(t) else float(F[0])


def stationary_force(sys: ShearSystem, grid: KGrid) -> float:
    """Grid sum of the stationary estimate ``dN_k/dt ~ 1/tau_k = 2 Im w_-``."""
    if sys.v == 0:
        return 0.0
    rate = sum(2.0 * growth_rate(sys, k, exact=True) for k in grid.points() if k.k_x > 0)
    return 2.0 * sys.omega_sp / sys.v * rate * grid.cell / (2.0 * math.pi) ** 2


def pendry_force(sys: ShearSystem, check: bool = False, rtol: float = 1e-6) -> float:
    """Stationary friction force per area from the ``k_y`` integral.

    ``F/A = omega_sp^3 / (4 pi v^2) int dk_y exp(-2 d sqrt(k_y^2 + (2 omega_sp/v)^2))``.

    This is half of Pendry's perturbative value, because the interaction
    Hamiltonian used here is half of his.  With ``check=True`` the double
    integral of :func:`pendry_force_double` is evaluated as well and a
    relative mismatch above ``rtol`` raises :class:`SymmetryViolationError`.
    """
    if not sys.v > 0:
        raise DomainError("pendry_force requires v > 0")
    w, v, d = sys.omega_sp, sys.v, sys.d
    k0 = 2.0 * w / v

    def integrand(ky):
        return math.exp(-2.0 * d * math.hypot(ky, k0))

    # integrand is even in k_y
    half, _ = quad(integrand, 0.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    F = w**3 / (4.0 * math.pi * v * v) * 2.0 * half
    if check:
        F2 = pendry_force_double(sys)
        if abs(F2 - F) > rtol * abs(F):
            raise SymmetryViolationError(
                f"k_x integral ({F2!r}) does not reproduce the closed form ({F!r})"
            )
    return F


def pendry_force_double(sys: ShearSystem, epsrel: float = 1e-10) -> float:
    """``(2 omega_sp / v) (2 pi)^-2 int_{k_x>0} int dk_x dk_y 2 w''_-`` by nested quadrature.

    ``w''_-`` is the weak-coupling growth rate with the coupling evaluated
    at the window centre ``k_x = 2 omega_sp / v``, which is the approximation
    under which the ``k_x`` integral has a closed form.
    """
    if not sys.v > 0:
        raise DomainError("pendry_force_double requires v > 0")
    w, v, d = sys.omega_sp, sys.v, sys.d
    k0 = 2.0 * w / v

    # beyond ky_max the coupling is below 1e-10 of its peak value
    reach = k0 + math.log(1e10) / d
    ky_max = math.sqrt(reach * reach - k0 * k0)

    def kx_integral(ky):
        c = math.exp(-d * math.hypot(ky, k0))
        half = w / v * c

        # k_x = k0 + half sin(theta) removes the square-root endpoints
        def rate(theta):
            x = math.sin(theta)
            return w * c * math.sqrt(max(1.0 - x * x, 0.0)) * half * math.cos(theta)

        val, _ = quad(rate, -math.pi / 2, math.pi / 2, epsabs=0.0, epsrel=epsrel, limit=200)
        return val

    half_ky, _ = quad(kx_integral, 0.0, ky_max, epsabs=0.0, epsrel=epsrel, limit=200)
    return 2.0 * w / v / (2.0 * math.pi) ** 2 * 2.0 * half_ky
