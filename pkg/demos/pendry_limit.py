"""Stationary friction force and its exponential sensitivity to speed."""
import math

import numpy as np

from fluctem.friction import ShearSystem, friction_grid, pendry_force, pendry_force_double, stationary_force

# Replacing dN/dt by the growth rate gives a time-independent force.  It can
# be written as a double integral over the unstable window or, after the
# k_x integral, as a single k_y integral.
print(f"{'v':>5}  {'d':>4}  {'single':>12}  {'double':>12}  {'rel diff':>9}")
for v in (0.3, 0.5, 1.0):
    for d in (0.5, 1.0, 2.0):
        s = ShearSystem(1.0, d, v)
        F, F2 = pendry_force(s), pendry_force_double(s)
        print(f"{v:5.2f}  {d:4.1f}  {F:12.5e}  {F2:12.5e}  {abs(F2 / F - 1):9.1e}")

# The same quantity summed on the grid used for the time-dependent problem,
# with exact growth rates.  The gap is the weak-coupling error exp(-2 k0 d).
for d in (1.0, 2.0):
    s = ShearSystem(1.0, d, 1.0)
    g = friction_grid(s, 64, 64)
    print(f"d = {d}: grid {stationary_force(s, g):.5e}, closed form {pendry_force(s):.5e}, "
          f"coupling^2 {math.exp(-4 * d):.1e}")

# Slow sheets barely rub: ln F falls linearly in 1/v with slope -4 omega_sp d.
u = np.linspace(10.0, 40.0, 7)
lnF = np.array([math.log(pendry_force(ShearSystem(1.0, 1.0, 1.0 / x))) for x in u])
print("1/v:", u)
print("ln F:", np.round(lnF, 3))
print(f"raw slope {np.polyfit(u, lnF, 1)[0]:.3f}, "
      f"slope after removing (5/2) ln(1/v) {np.polyfit(u, lnF - 2.5 * np.log(u), 1)[0]:.3f}, expected -4")
