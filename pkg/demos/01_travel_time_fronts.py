"""Travel-time fronts for two particles.

A point (r1, r2) in reduced radial space is reached at the travel time tau
for which the constant speeds r / tau carry the total energy.  Here we
trace one front for slow and for fast particles and look at how the
relativistic front flattens against r_n = tau.
"""
import numpy as np

from multigamow import ParticleSystem, front_surface_sample, lorentz_factors, solve_tau

# Slow particles: the front is a quarter ellipse, sum m r^2 / 2 = E tau^2.
slow = ParticleSystem((1.0, 3.0))
pts, res = front_surface_sample(slow, energy=2.0, tau_r=1.5, count=7)
print("nonrelativistic front at tau = 1.5")
for p, r in zip(pts, res):
    print(f"  r = ({p[0]:.4f}, {p[1]:.4f})   tau = {solve_tau(p, slow, 2.0):.12f}   residual = {r:.1e}")

# Fast particles: as the energy grows, every coordinate approaches tau.
fast = ParticleSystem((1.0, 1.0), "relativistic")
print("\nrelativistic fronts at tau = 1 (largest coordinate on the diagonal)")
for energy in (2.5, 5.0, 20.0, 200.0):
    pts, _ = front_surface_sample(fast, energy, 1.0, 21)
    diag = pts[10]
    gamma = lorentz_factors(diag, 1.0, fast)
    print(f"  E = {energy:6.1f}: diagonal point r = {diag[0]:.6f}, gamma = {gamma[0]:.2f}")

# Homogeneity: scaling every radius scales tau.
r = np.array([0.4, 0.9])
print("\ntau(lambda r) / (lambda tau(r)):",
      [round(solve_tau(lam * r, fast, 5.0) / (lam * solve_tau(r, fast, 5.0)), 14) for lam in (0.5, 2, 10)])
