"""Causality check of two textbook metals: Drude and the lossless plasma."""
import numpy as np

from fluctem.materials import DrudeParams, PlasmaParams, drude_epsilon, kk_grid, kk_residual, plasma_epsilon

drude = DrudeParams(omega_p=1.0, gamma=0.2)
plasma = PlasmaParams(omega_p=1.0)


def drude_model(w):
    return drude_epsilon(w, drude)


def plasma_model(w):
    return plasma_epsilon(w, plasma) + 0j


# The residual compares Re eps - 1 with the principal-value integral over Im eps.
grid = kk_grid(omega_max=100.0)
print(f"{'omega':>6}  {'Drude':>10}  {'plasma':>10}  {'wp^2/w^2':>9}")
for w in (0.2, 0.5, 1.0, 2.0, 5.0):
    print(f"{w:6.2f}  {kk_residual(drude_model, grid, w):10.2e}  "
          f"{kk_residual(plasma_model, grid, w):10.4f}  {1.0 / w**2:9.4f}")

# Refining the grid shrinks the Drude residual until only the part of the
# integral above the cutoff is missing; the plasma residual never moves.
for n in (101, 301, 1001, 4001):
    g = kk_grid(100.0, n)
    print(f"n = {n:5d}: Drude {kk_residual(drude_model, g, 0.5, check=False):.3e}   "
          f"plasma {kk_residual(plasma_model, g, 0.5, check=False):.6f}")

# The lossless model hides a delta function at zero frequency in Im eps,
# which is exactly the missing omega_p^2 / omega^2.
print("Drude with decreasing gamma at omega = 0.5:")
for gamma in (0.2, 0.05, 0.01):
    model = lambda w, p=DrudeParams(1.0, gamma): drude_epsilon(w, p)  # noqa: E731
    print(f"  gamma = {gamma:5.2f}: residual {kk_residual(model, kk_grid(100.0, 20001, 1e-6), 0.5):.2e}")
