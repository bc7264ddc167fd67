"""
The scalar factor delta and the exponent nu
===========================================

For xi = x/(12t) < 0 the stationary points are +-k0 = +-sqrt(-xi).  The
function delta solves a scalar jump problem on |k| > k0 with jump 1 + r1 r2.
"""

import math

import numpy as np

from nmkdv import scattering as sc
from nmkdv import spectral as sp

# Pure step, A = 2, xi = -1: nu is ln 2 / 2 pi in closed form
ps = sp.pure_step_spectral_data(2.0)
cache = sp.build_delta_cache(ps, -1.0)
print("nu =", cache.nu, " closed form:", math.log(2) / (2 * math.pi))

# The pure step's 1 + r1 r2 is even and real, so delta(0) = 1 exactly.
# A bump breaks the symmetry and nu picks up an imaginary part.
data = sp.build_spectral_data(sc.bump_step(1.0))
for xi in (-1.0, -4.0, -16.0):
    c = sp.build_delta_cache(data, xi)
    print(f"xi = {xi:6.1f}  nu = {c.nu:.6f}  delta(0) = {c.delta_at_0:.10f}")

# Jump across the contour and the far-field limit
c = sp.build_delta_cache(data, -1.0)
for s in (1.5, -2.0, 6.0):
    ratio = c.delta(s, +1) / c.delta(s, -1)
    print(f"s = {s:5.1f}  delta+/delta- = {ratio:.12f}  1 + r1 r2 = "
          f"{data.spectrum.one_plus_r1r2(np.array([s]))[0]:.12f}")
print("|delta(1e3) - 1| =", abs(c.delta(1e3, +1) - 1))
