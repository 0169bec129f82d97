"""Field fluctuations in a medium whose absorption is switched off gradually."""
import math

import numpy as np

from fluctem.spectra import MediumPoint, ThermalState, field_spectral_density, lossless_limit_trace

# A weakly absorbing medium, eps = 1 + i delta.  As delta shrinks the
# spectral density at fixed (omega, R) creeps towards the vacuum value.
omega, R = 1.0, 1.0
trace = lossless_limit_trace(omega, R, np.logspace(-1, -6, 6))
print(f"vacuum value 2 omega^2 sin(omega R) / R = {trace.limit:.12f}")
print(f"{'delta':>8}  {'density':>16}  {'error':>10}")
for d, val, err in zip(trace.deltas, trace.density, trace.errors()):
    print(f"{d:8.0e}  {val:16.12f}  {err:10.3e}")

# The error drops by a decade per decade of delta: the approach is linear.
errs = trace.errors()
print("successive error ratios:", np.round(errs[:-1] / errs[1:], 4))

# Temperature multiplies everything by coth(omega / 2T).
for T in (0.0, 0.5, 2.0):
    val = field_spectral_density(MediumPoint(1.0, R), omega, ThermalState(T))
    print(f"T = {T:3.1f}: density {val:.6f}  (coth factor {val / trace.limit:.6f})")

# A lossy, metallic medium screens the field: the density decays with R.
for R in (0.5, 1.0, 2.0, 4.0):
    val = field_spectral_density(MediumPoint(-3.0 + 0.5j, R), omega)
    print(f"R = {R:3.1f}: metal {val: .3e}   vacuum {2 * omega**2 * math.sin(omega * R) / R: .3e}")
