"""Plasmon pairs created between two sheared sheets, and the resulting force."""
import math
import warnings

import numpy as np

from fluctem.friction import (
    ShearSystem,
    WaveVector,
    eigenvalues_closed_form,
    friction_force,
    friction_grid,
    growth_rate,
    instability_window,
    max_growth_rate,
    quanta_trace,
)

sys = ShearSystem(omega_sp=1.0, d=1.0, v=1.0)
k0 = sys.peak_wave_vector()
print(f"peak channel k_x = {k0.k_x}, coupling exp(-k d) = {sys.coupling(k0):.4f}")

# Scan k_x through the resonance: one eigenvalue pair turns imaginary.
print(f"{'k_x':>6}  {'w_+':>18}  {'w_-':>22}  {'rate':>8}")
for kx in np.linspace(1.8, 2.2, 9):
    k = WaveVector(kx)
    lam = eigenvalues_closed_form(sys, k)
    print(f"{kx:6.3f}  {lam[0]:18.6f}  {lam[1]:22.6f}  {growth_rate(sys, k, exact=True):8.5f}")

win = instability_window(sys, k0.k_par)
exact = instability_window(sys, k0.k_par, exact=True)
print(f"unstable |k.v|/omega_sp: weak coupling ({win.lo:.5f}, {win.hi:.5f}), exact ({exact.lo:.5f}, {exact.hi:.5f})")

# Quanta in the peak channel for three gaps; ln N becomes a straight line.
for d in (0.6, 1.15, 1.75):
    s = ShearSystem(1.0, d, 1.0)
    rate = growth_rate(s, s.peak_wave_vector(), exact=True)
    t = np.linspace(0.0, 10.0 / rate, 6)
    N = quanta_trace(s, s.peak_wave_vector(), t).N
    late = np.linspace(5.0 / rate, 10.0 / rate, 20)
    slope = np.polyfit(late, np.log(quanta_trace(s, s.peak_wave_vector(), late).N), 1)[0]
    print(f"d = {d:4.2f}: N(t) = {np.array2string(N, precision=3)}  slope {slope:.5f} vs 2 rate {2 * rate:.5f}")

# Summing dN/dt over a grid around the window gives the friction force.
grid = friction_grid(sys, 32, 32)
gm = max_growth_rate(sys, grid)
times = np.linspace(0.0, 40.0 / gm, 9)
with warnings.catch_warnings():
    warnings.simplefilter("error")
    F = friction_force(sys, grid, times)
print(f"{'t':>8}  {'F/A':>12}")
for t, f in zip(times, F):
    print(f"{t:8.1f}  {f:12.4e}")
late = times >= 20.0 / gm
print(f"late exponent {np.polyfit(times[late], np.log(F[late]), 1)[0]:.5f}, 2 x peak rate {2 * gm:.5f}")
print(f"e-folding of the force: {1 / (2 * gm):.1f} time units ({math.log(F[-1] / F[-2]):.2f} per row)")
