"""The leading edge of a decaying multi-particle wave.

Near a narrow resonance the energy integral over outgoing waves reduces to
a pole integral.  Closing the contour gives a sharp causal step at the
travel time tau0, followed by exponential decay.  The direct quadrature
below shows the step emerging as the energy window widens.
"""
import numpy as np

from multigamow import ComplexEnergy, wavefront_factor, wavefront_factor_oracle

energy = ComplexEnergy(e0=2.0, gamma=0.2)
tau0 = 3.0

print("  t - tau0   closed form          |err| L=80      |err| L=320")
for dt in (-10.0, -2.0, -0.5, 0.5, 2.0, 10.0):
    exact = wavefront_factor(tau0 + dt, tau0, energy)
    errs = [abs(wavefront_factor_oracle(tau0 + dt, tau0, energy, cutoff) - exact) for cutoff in (80.0, 320.0)]
    print(f"  {dt:7.1f}   {exact.real:+.5f}{exact.imag:+.5f}i   {errs[0]:.2e}      {errs[1]:.2e}")

# Exactly on the front the truncated integral gives half the step.
print("\nat t = tau0 the oracle gives", np.round(wavefront_factor_oracle(tau0, tau0, energy, 400.0), 4))
