"""
Long-time asymptotics along rays
================================

Sectors of the (x, t) plane, the soliton region, and the t^(-1/2) decay of
the oscillating correction in the two self-similar sectors.
"""

import math

import numpy as np

from nmkdv import asymptotics as asy
from nmkdv import spectral as sp
from nmkdv.soliton import SolitonParams, one_soliton, soliton_spectral_fixture

# Sector map for kappa = 1
for x, t in [(-12, 1), (12, -1), (1.2, 1), (6, 1), (24, 1), (-1.2, -1), (-6, -1), (-24, -1)]:
    print(f"(x, t) = ({x:6.1f}, {t:3d})  ->  {asy.classify_sector(x, t, 1.0)}")

# Reflectionless data: the asymptotic formula is the exact soliton
fx = soliton_spectral_fixture(2.0)
p = SolitonParams(2.0, -1)
for x, t in [(2.0, 1.0), (5.0, 2.0)]:
    r = asy.evaluate_RI(x, t, fx)
    print(f"R_I_L  u = {r.u_total:.15f}  exact = {one_soliton(p, x, t):.15f}")

# Pure step: the subleading amplitude decays like |t|^(-1/2)
ps = sp.pure_step_spectral_data(2.0)
cache = sp.build_delta_cache(ps, -1.0)
params = asy.asym_params(-1.0, 1.0, ps, cache)
print("beta gamma =", params.beta * params.gamma, " nu =", cache.nu)
for t0 in (1e2, 1e4, 1e6):
    ts = t0 + np.linspace(0, 1, 240)
    env = max(abs(asy.evaluate_RII(-12 * t, t, ps, cache).u_subleading) for t in ts)
    print(f"t ~ {t0:8.0e}  envelope {env:.4e}  envelope * sqrt(t) {env * math.sqrt(t0):.5f}")

r = asy.evaluate(12 * 100, -100, ps, cache)
print(f"R_IV at t = -100: leading {r.u_leading}, correction {r.u_subleading:.5f}, {r.error_order}")
