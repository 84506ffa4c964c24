"""A resonance we can solve exactly: the s-wave delta shell.

The shell strength g traps the particle more tightly as it grows, so the
resonances narrow toward the levels of a sealed box, k a = n pi.  The
residue of the Green's function at a pole factorizes into the product of
Gamow states divided by the pseudo-norm, which does not depend on the
radius where it is evaluated.
"""
from multigamow import delta_shell as ds

for g in (10.0, 20.0, 100.0, 1000.0):
    res = ds.find_pole(g, a=1.0)
    print(f"g = {g:7.1f}: k = {res.k_pole:.6f}  E0 = {res.e0:.5f}  Gamma = {res.gamma:.3e}")

res = ds.find_pole(20.0, 1.0)
print("\npseudo-norm at several cutoff radii")
for radius in (2.0, 5.0, 10.0, 40.0):
    print(f"  R = {radius:5.1f}: N = {ds.pseudo_norm_1p(res, radius):.12f}")

residue, factorized = ds.residue_check(res, 2.0, 3.0)
print(f"\ncontour residue   {residue:.10e}")
print(f"u(r) u(r') / N    {factorized:.10e}")
