import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluctem.errors import DomainError, GridTooCoarseError, PoleError
from fluctem.materials import (
    DriftParams,
    DrudeParams,
    ParticleParams,
    PlasmaParams,
    drift_epsilon_longitudinal,
    drift_epsilon_tensor,
    drude_epsilon,
    kk_grid,
    kk_residual,
    particle_polarizability,
    plasma_epsilon,
    reflection_factor,
    surface_response,
)

pos = st.floats(1e-3, 1e2)


# --- parameter types -------------------------------------------------------


@pytest.mark.parametrize(
    "factory",
    [
        lambda: PlasmaParams(0.0),
        lambda: DrudeParams(1.0, gamma=-0.1),
        lambda: DrudeParams(-1.0),
        lambda: DrudeParams(1.0, eps_L=lambda w: 2.0 - 0.1j + 0 * w),
        lambda: ParticleParams(1.0, 1.0, 0.0),
        lambda: ParticleParams(0.0, 1.0, 0.1),
        lambda: DriftParams(DrudeParams(1.0), (1.0, 2.0)),
        lambda: DriftParams(DrudeParams(1.0), (math.inf, 0.0, 0.0)),
    ],
)
def test_invalid_params(factory):
    with pytest.raises(ValueError):
        factory()


def test_scalar_drift_is_along_x():
    p = DriftParams(DrudeParams(1.0), 0.3)
    assert p.v0 == (0.3, 0.0, 0.0)
    assert p.v0x == 0.3


# --- plasma ------------------------------------------------------------------


def test_plasma_examples():
    p = PlasmaParams(2.0)
    assert plasma_epsilon(2.0, p) == 0.0
    assert plasma_epsilon(1e9, p) == pytest.approx(1.0, abs=1e-15)
    assert plasma_epsilon(2.0 / math.sqrt(2), p) == pytest.approx(-1.0, rel=1e-15)


def test_plasma_pole():
    with pytest.raises(PoleError):
        plasma_epsilon(np.array([1.0, 0.0]), PlasmaParams(1.0))


# --- Drude -------------------------------------------------------------------


def test_drude_reduces_to_plasma():
    w = np.geomspace(0.01, 100, 50)
    np.testing.assert_allclose(
        drude_epsilon(w, DrudeParams(1.3)).real, plasma_epsilon(w, PlasmaParams(1.3)), rtol=1e-14
    )
    assert np.all(drude_epsilon(w, DrudeParams(1.3)).imag == 0)
    assert drude_epsilon(1.3, DrudeParams(1.3)) == pytest.approx(0.0, abs=1e-15)


def test_drude_value_against_mpmath():
    mpmath.mp.dps = 30
    expected = 1 - 1 / (1 + mpmath.mpc(0, "0.1"))
    got = drude_epsilon(1.0, DrudeParams(1.0, 0.1))
    assert got.real == pytest.approx(float(expected.real), rel=1e-14)
    assert got.imag == pytest.approx(float(expected.imag), rel=1e-14)
    assert got == pytest.approx(0.009901 + 0.099010j, abs=1e-6)


def test_drude_callable_lattice():
    p = DrudeParams(1.0, 0.1, eps_L=lambda w: 4.0 + 0.2j / (1 + w**2))
    w = np.array([0.5, 2.0])
    np.testing.assert_allclose(
        drude_epsilon(w, p), 4.0 + 0.2j / (1 + w**2) - 1.0 / (w * (w + 0.1j)), rtol=1e-14
    )


def test_drude_domain():
    with pytest.raises(DomainError):
        drude_epsilon(0.0, DrudeParams(1.0, 0.1))


@given(w=pos, wp=pos, gamma=st.floats(1e-4, 10), im_l=st.floats(0, 1))
def test_drude_passive(w, wp, gamma, im_l):
    eps = drude_epsilon(w, DrudeParams(wp, gamma, 1.0 + 1j * im_l))
    assert eps.imag > 0


# --- drifting plasma -----------------------------------------------------------


@given(w=pos, wp=pos, gamma=st.floats(0, 10), k=st.lists(st.floats(-10, 10), min_size=3, max_size=3))
def test_tensor_at_rest_is_drude(w, wp, gamma, k):
    eps = drift_epsilon_tensor(w, k, DriftParams(DrudeParams(wp, gamma, 2.5)))
    expected = drude_epsilon(w, DrudeParams(wp, gamma, 2.5))
    np.testing.assert_array_equal(eps, expected * np.eye(3))


def test_tensor_without_carriers():
    p = DriftParams(DrudeParams(0.0, 0.1, 3.0), (0.2, 0.1, 0.0))
    np.testing.assert_array_equal(drift_epsilon_tensor(1.0, [1.0, 2.0, 0.0], p), 3.0 * np.eye(3))


def test_tensor_poles():
    p = DriftParams(DrudeParams(1.0, 0.1), (0.5, 0.0, 0.0))
    with pytest.raises(PoleError):
        drift_epsilon_tensor(0.0, [1.0, 0.0, 0.0], p)
    with pytest.raises(PoleError):
        drift_epsilon_tensor(1.0, [2.0, 0.0, 0.0], p)


def test_longitudinal_projection_identity_random():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        w = rng.uniform(0.05, 5.0)
        wp = rng.uniform(0.1, 3.0)
        gamma = rng.uniform(0.0, 1.0)
        eps_L = rng.uniform(1.0, 5.0)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        kmag = rng.uniform(0.1, 10.0)
        vmag = rng.uniform(-0.5, 0.5)
        k, v0 = kmag * direction, vmag * direction
        p = DriftParams(DrudeParams(wp, gamma, eps_L), tuple(v0))
        proj = direction @ drift_epsilon_tensor(w, k, p) @ direction
        ref = drift_epsilon_longitudinal(w, k @ v0, p)
        worst = max(worst, abs(proj - ref) / abs(ref))
    assert worst < 1e-12


def test_longitudinal_examples():
    p = DriftParams(DrudeParams(1.0, 0.05))
    got = drift_epsilon_longitudinal(0.8, 0.3, p)
    assert got == pytest.approx(1 - 1 / ((0.5 + 0.05j) * 0.5), rel=1e-14)
    # at rest it is the Drude function
    q = DriftParams(DrudeParams(1.2, 0.3, 2.0))
    assert drift_epsilon_longitudinal(0.7, 0.0, q) == pytest.approx(drude_epsilon(0.7, q.drude), rel=1e-15)
    # lossless: plasma at the shifted frequency
    r = DriftParams(DrudeParams(1.2))
    assert drift_epsilon_longitudinal(0.7, 0.2, r) == pytest.approx(1 - 1.44 / 0.25, rel=1e-14)


def test_longitudinal_pole_survives_damping():
    p = DriftParams(DrudeParams(1.0, 0.5))
    with pytest.raises(PoleError):
        drift_epsilon_longitudinal(np.array([0.8, 0.3]), 0.3, p)


# --- particle ------------------------------------------------------------------


def test_polarizability_examples():
    p = ParticleParams(2.0, 1.5, 0.1)
    assert particle_polarizability(0.0, p) == 2.0
    assert particle_polarizability(1.5, p) == pytest.approx(1j * 2.0 * 1.5 / 0.1, rel=1e-14)
    w = 1e6
    assert particle_polarizability(w, p).real == pytest.approx(-2.0 * 1.5**2 / w**2, rel=1e-6)


@given(w=st.floats(-50, 50), a0=pos, w0=pos, eta=pos)
def test_polarizability_crossing(w, a0, w0, eta):
    p = ParticleParams(a0, w0, eta)
    assert particle_polarizability(-w, p) == np.conj(particle_polarizability(w, p))
    if w > 0:
        assert particle_polarizability(w, p).imag > 0


# --- surface response ----------------------------------------------------------


def test_reflection_examples():
    assert reflection_factor(3.0) == 0.5
    assert reflection_factor(1.0) == 0.0
    for delta in (1e-3, 1e-6, 1e-9):
        assert abs(reflection_factor(-1 + 1j * delta)) == pytest.approx(2 / delta, rel=1e-6)
    with pytest.raises(PoleError):
        reflection_factor(-1.0)


def test_surface_response_uses_kx_doppler():
    p = DriftParams(DrudeParams(1.0, 0.05), (0.4, 0.0, 0.0))
    eps = drift_epsilon_longitudinal(0.9, 0.5 * 0.4, p)
    assert surface_response(0.9, 0.5, p) == (eps - 1) / (eps + 1)


# --- Kramers-Kronig --------------------------------------------------------------


def _drude_model(wp=1.0, gamma=0.2):
    p = DrudeParams(wp, gamma)
    return lambda w: drude_epsilon(w, p)


def test_kk_drude_small_and_converging():
    model = _drude_model()
    residuals = [kk_residual(model, kk_grid(100.0, n), 0.5, check=False) for n in (101, 301, 1001)]
    assert residuals[0] > residuals[1] > residuals[2]
    assert kk_residual(model, kk_grid(100.0, 4001), 0.5) < 0.02


def test_kk_drude_residual_is_the_truncated_tail():
    # Drude obeys KK exactly, so on a fine grid only the part of the integral
    # above the cutoff is missing.  w Im eps = gamma wp^2 / (w^2 + gamma^2).
    from scipy.integrate import quad

    gamma, wt, top = 0.2, 0.5, 100.0
    tail, _ = quad(lambda w: gamma / (w**2 + gamma**2) / (w**2 - wt**2), top, np.inf, epsrel=1e-12)
    got = kk_residual(_drude_model(1.0, gamma), kk_grid(top, 16001, 1e-6), wt)
    assert got == pytest.approx(2 / np.pi * tail, rel=1e-3)


def test_kk_plasma_and_vacuum():
    pp = PlasmaParams(1.0)
    grid = kk_grid(100.0)
    assert kk_residual(lambda w: plasma_epsilon(w, pp) + 0j, grid, 0.5) == pytest.approx(4.0, abs=1e-12)
    assert kk_residual(lambda w: np.ones_like(w, dtype=complex), grid, 0.5) == 0.0


def test_kk_plasma_does_not_refine_away():
    pp = PlasmaParams(1.0)
    model = lambda w: plasma_epsilon(w, pp) + 0j  # noqa: E731
    values = [kk_residual(model, kk_grid(100.0, n), 0.5) for n in (501, 2001, 8001)]
    np.testing.assert_allclose(values, 4.0)


def test_kk_grid_point_on_test_frequency():
    model = _drude_model()
    grid = np.sort(np.append(kk_grid(100.0), 0.5))
    assert kk_residual(model, grid, 0.5) < 0.02


def test_kk_too_coarse():
    model = _drude_model(gamma=0.01)
    with pytest.raises(GridTooCoarseError):
        kk_residual(model, kk_grid(100.0, 12), 0.5)


@pytest.mark.parametrize(
    "grid,wt",
    [([1.0, 0.5, 2.0], 0.7), ([0.1, 0.2], 0.15), ([0.1, 1.0, 2.0], 3.0), ([0.0, 1.0, 2.0], 0.5)],
)
def test_kk_bad_grid(grid, wt):
    with pytest.raises(DomainError):
        kk_residual(_drude_model(), grid, wt)


@settings(max_examples=25, deadline=None)
@given(gamma=st.floats(0.1, 1.0), wt=st.floats(0.2, 3.0))
def test_kk_drude_property(gamma, wt):
    assert kk_residual(_drude_model(1.0, gamma), kk_grid(200.0), wt) < 0.02
