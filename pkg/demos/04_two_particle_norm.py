"""Pseudo-norm of a two-particle outgoing state.

The state is built by sharing the resonance energy between two outgoing
waves.  Integrating u^2 inside a growing front picks up a term that
oscillates and grows with the front; the weighted surface term cancels
most of it.  The combined value settles while the volume alone keeps
moving.
"""
import numpy as np

from multigamow import ParticleSystem, norm_convergence_scan, partition_state

system = ParticleSystem((1.0, 1.0))
energy = 1.0 - 0.0025j
state = partition_state(system, energy)

period = np.pi / 2  # period of exp(2iS) in tau at E0 = 1
grid = period * np.array([8.0, 12.0, 16.0, 24.0, 32.0])
scan = norm_convergence_scan(state, system, energy, grid)

print("  tau_R      volume                     norm")
for t, v, s, n in scan.rows():
    print(f"  {t:6.2f}   {v.real:+.6f}{v.imag:+.6f}i   {n.real:+.6f}{n.imag:+.6f}i")

drift = lambda x: np.max(np.abs(x - x[-1])) / abs(x[-1])  # noqa: E731
print(f"\nrelative drift: volume {drift(scan.volume_terms):.3f}, norm {drift(scan.norms):.3f}")
