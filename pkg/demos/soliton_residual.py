"""
Checking a field against the equation
=====================================

u_t + 6 u(x,t) u(-x,-t) u_x + u_xxx on a symmetric lattice with 4th-order
stencils.  The one-soliton should leave only discretisation error.
"""

from nmkdv import validation as va
from nmkdv.soliton import SolitonParams, one_soliton

p = SolitonParams(1.0, -1)
prev = None
for h in (0.08, 0.04, 0.02, 0.01):
    x = va.lattice(-10, 10, h)
    f = va.sample_field(lambda X, T: one_soliton(p, X, T), x, x)
    r = va.residual_stats(va.pde_residual(f))["max_abs"]
    note = "" if prev is None else f"   ratio {prev / r:5.2f}"
    print(f"h = {h:5.3f}  max residual {r:.3e}{note}")
    prev = r
# the last ratio drops below 16: at h = 0.01 roundoff in the u_xxx stencil,
# about eps / h^3, is already comparable with the truncation error

wide = va.sample_field(lambda X, T: one_soliton(p, X, T), va.lattice(-30, 30, 0.1), va.lattice(-1, 1, 0.1))
rep = va.boundary_check(wide, 1.0)
print("edge gaps: right", rep["max_right_gap"], " left", rep["max_left_gap"])
