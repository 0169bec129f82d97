"""Drag on a small particle hovering above a plate that carries a current."""
import numpy as np

from fluctem.drag import DragConfig, drag_asymptotics, drag_force, kappa
from fluctem.materials import DriftParams, DrudeParams, ParticleParams

plate = DriftParams(DrudeParams(omega_p=1.414, gamma=0.05, eps_L=1.0), (0.5, 0.0, 0.0))
particle = ParticleParams(alpha0=1.0, omega0=1.0, eta=0.1)
cfg = DragConfig(plate, particle, z0=1.0)

res = drag_force(cfg, tol=1e-8)
print(f"v0 = {cfg.v0}: F_x = {res.F_x:.8e} +- {res.abs_error_estimate:.1e} ({res.evaluations} integrand calls)")
print(f"reversed current: F_x = {drag_force(cfg.with_v0(-0.5), tol=1e-8).F_x:.8e}")
print(f"no current:       F_x = {drag_force(cfg.with_v0(0.0)).F_x}")

# The particle is pulled along with the electrons.  Force against drift speed:
print(f"{'v0':>8}  {'kappa':>7}  {'F_x':>12}")
for v0 in np.geomspace(0.01, 100.0, 9):
    c = cfg.with_v0(v0)
    print(f"{v0:8.3f}  {kappa(c):7.3f}  {drag_force(c, tol=1e-7).F_x:12.4e}")

# Power laws in the slow and fast regimes.
v0 = np.concatenate([np.geomspace(0.01, 0.1, 5), np.geomspace(10.0, 100.0, 5)])
fit = drag_asymptotics(cfg, v0, small=(0.0, 0.1), large=(10.0, np.inf))
print(f"slow drift: F ~ v0^{fit.p_small:.3f}   fast drift: F ~ v0^{fit.p_large:.3f}")

# Heating the electrons adds thermal drag on top of the quantum part.
for T in (0.0, 0.05, 0.2):
    c = DragConfig(plate, particle, 1.0, T_el=T, T_p=T)
    print(f"T = {T:4.2f}: F_x = {drag_force(c, tol=1e-7).F_x:.6e}")

# The force falls off steeply with height.
for z0 in (0.5, 1.0, 2.0, 4.0):
    print(f"z0 = {z0:3.1f}: F_x = {drag_force(cfg.with_z0(z0), tol=1e-7).F_x:.4e}")
