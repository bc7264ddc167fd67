"""
Scattering data of step-like initial profiles
=============================================

The pure step has a closed-form scattering matrix, which makes it the
reference case.  We integrate the Jost equations numerically, compare with
the closed form, then move on to a step carrying a Gaussian bump.
"""

import numpy as np

from nmkdv import scattering as sc
from nmkdv import spectral as sp

# Pure step first: numerical S(k) against the closed form
k = np.linspace(0.05, 20, 200)
for A in (0.5, 1.0, 2.0, 4.0):
    S = sc.scattering_table(sc.pure_step(A), k).S
    err = np.max(np.abs(S - sc.pure_step_S(A, k)))
    print(f"A = {A:3.1f}   max |S - S_exact| = {err:.2e}")

# A bump on top of the step.  Symmetric k-grid so the conjugation identities can be checked
bump = sc.bump_step(1.0)
kk = np.concatenate([-k[::-1], k])
table = sc.scattering_table(bump, kk)
for name, v in sc.verify_scattering_identities(table).items():
    print(f"{name:>16s}  {v:.2e}")

# The discrete eigenvalue i kappa: root of a1 on the imaginary axis,
# and the trace-formula value built from the reflection data alone
kappa, a1p = sp.find_kappa_root(bump)
spectrum, _ = sp.sample_spectrum(bump)
case = sp.classify_case(spectrum)
formula = sp.kappa_by_formula(spectrum, bump.A, case)
print(f"case {case}: kappa (root) = {kappa:.12f}, kappa (formula) = {formula.kappa:.12f}")
print(f"a1'(i kappa) = {a1p:.6f}, gamma0 = {sp.gamma0_factor(bump, kappa)}")
