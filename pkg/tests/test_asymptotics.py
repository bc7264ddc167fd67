import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nmkdv import asymptotics as asy
from nmkdv import spectral as sp
from nmkdv.soliton import SolitonParams, one_soliton


@pytest.mark.parametrize("x, t, sector", [
    (-12.0, 1.0, "R_II"),
    (12.0, -1.0, "R_IV"),
    (1.2, 1.0, "R_I_L"),
    (6.0, 1.0, "R_I_M"),
    (24.0, 1.0, "R_I_R"),
    (-1.2, -1.0, "R_III_R"),
    (-6.0, -1.0, "R_III_M"),
    (-24.0, -1.0, "R_III_L"),
    (4.0, 1.0, "Boundary"),
    (12.0, 1.0, "Boundary"),
    (0.0, 3.0, "Boundary"),
])
def test_sector_map(x, t, sector):
    assert asy.classify_sector(x, t, kappa=1.0) == sector


def test_time_axis_rejected():
    with pytest.raises(asy.OnTimeAxis):
        asy.classify_sector(1.0, 0.0, 1.0)


def test_phase_saddles():
    theta, (a, b) = asy.phase_and_saddles(2.0, -1.0)
    assert theta == pytest.approx(32 - 24)
    assert (a, b) == (1.0, -1.0)
    _, (c, _) = asy.phase_and_saddles(1.0, 4.0)
    assert c == 2j


def test_soliton_constants(fixture_2):
    C1, C2 = asy.soliton_constants(fixture_2)
    assert C1 == pytest.approx(-1) and C2 == pytest.approx(-2)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 0.3), st.floats(0.5, 30))
def test_solitonic_region_is_exact(fixture_2, xi_frac, t):
    # xi in (0, kappa^2 / 3) for kappa = 1
    x = 12 * t * xi_frac
    exact = one_soliton(SolitonParams(2.0, -1), x, t)
    assert abs(asy.evaluate_RI(x, t, fixture_2).u_total - exact) <= 1e-12
    # mirrored sector, corrected sign
    r = asy.evaluate_RIII(-x, -t, fixture_2)
    assert abs(r.u_total - one_soliton(SolitonParams(2.0, -1), -x, -t)) <= 1e-12
    assert r.params.u_literal == pytest.approx(-r.u_total, abs=1e-12)


def test_soliton_sector_plateaus(fixture_2):
    assert asy.evaluate_RI(24.0, 1.0, fixture_2).u_total == 2.0
    assert asy.evaluate_RI(6.0, 1.0, fixture_2).u_total == 2.0
    assert asy.evaluate_RIII(-24.0, -1.0, fixture_2).u_total == 0.0


def test_wrong_sector(fixture_2, pure_step_2, pure_step_2_cache):
    with pytest.raises(asy.WrongSector):
        asy.evaluate_RI(-1.0, 1.0, fixture_2)
    with pytest.raises(asy.WrongSector):
        asy.evaluate_RII(1.0, 1.0, pure_step_2, pure_step_2_cache)


def test_beta_gamma_product(pure_step_2, pure_step_2_cache):
    p = asy.asym_params(-1.0, 1.0, pure_step_2, pure_step_2_cache)
    assert abs(p.beta * p.gamma - p.nu) < 1e-12
    # the literal formula differs by an overall sign for these data
    assert abs(p.gamma_literal + p.gamma) < 1e-12


def test_pure_step_regression(pure_step_2, pure_step_2_cache):
    r2 = asy.evaluate(-12.0, 1.0, pure_step_2, pure_step_2_cache)
    assert r2.sector == "R_II" and r2.u_leading == 0
    assert r2.u_subleading == pytest.approx(-0.2632297401113207, abs=1e-8)
    r4 = asy.evaluate(12.0, -1.0, pure_step_2, pure_step_2_cache)
    assert r4.u_leading == pytest.approx(2.0, abs=1e-12)
    assert r4.u_subleading == pytest.approx(0.29138121271767564, abs=1e-8)
    assert "[II.b]" in r4.error_order
    assert r4.error_exponent == pytest.approx(-0.875)


@pytest.mark.parametrize("im_nu, branch", [(-0.3, "II.a"), (0.0, "II.b"), (0.05, "II.b"), (0.3, "II.c")])
def test_riv_branch(im_nu, branch):
    assert asy.riv_branch(im_nu, 0.9) == branch


def test_subleading_decay_rate(pure_step_2, pure_step_2_cache):
    env = []
    ts = [1e2, 1e4]
    for t0 in ts:
        t = t0 + np.linspace(0, 1, 200)
        env.append(max(abs(asy.evaluate_RII(-12 * tt, tt, pure_step_2, pure_step_2_cache).u_subleading)
                       for tt in t))
    slope = math.log(env[1] / env[0]) / math.log(ts[1] / ts[0])
    assert abs(slope + 0.5) < 0.02


def test_parameter_ranges(pure_step_2, pure_step_2_cache):
    with pytest.raises(ValueError):
        asy.asym_params(-1.0, 1.0, pure_step_2, pure_step_2_cache, alpha=0.2)
    with pytest.raises(ValueError):
        asy.asym_params(-1.0, 1.0, pure_step_2, pure_step_2_cache, kappa_delta=1.5)
    fake = sp.DeltaCache(xi=-1.0, k0=1.0, nu=0.6j, Delta=0.0, delta_at_0=1, delta_at_ikappa=1,
                         chi_at_minus_k0=0, chi_hat_at_minus_k0=0)
    with pytest.raises(asy.NuOutOfRange):
        asy.asym_params(-1.0, 1.0, pure_step_2, fake)


def test_boundary_dispatch(pure_step_2):
    r = asy.evaluate(4.0, 1.0, pure_step_2)
    assert r.sector == "Boundary" and math.isnan(r.u_total)


def test_record_columns(pure_step_2, pure_step_2_cache):
    rec = asy.evaluate(-12.0, 1.0, pure_step_2, pure_step_2_cache).record()
    assert list(rec) == ["x", "t", "xi", "sector", "u_leading", "u_subleading", "u_total",
                         "error_order_exponent"]


# --- parabolic-cylinder model -----------------------------------------------

@pytest.mark.parametrize("nu", [0.05, 0.11, 0.3, 0.2 - 0.1j])
@pytest.mark.parametrize("zeta", [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])
def test_parametrix_jump(nu, zeta):
    m = asy.parametrix_model(nu, 0.3 + 0.2j)
    assert m.jump_residual(zeta) < 1e-7


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 0.45), st.floats(0.1, 3), st.floats(-3, 3))
def test_parametrix_constants(nu, q_abs, q_arg):
    q1 = q_abs * complex(math.cos(q_arg), math.sin(q_arg))
    m = asy.parametrix_model(nu, q1)
    assert abs(m.beta * m.gamma - nu) < 1e-7
    b, g, _ = m.beta_gamma_from_ode(0.7 + 0.3j)
    assert abs(b - m.beta) < 1e-8 * max(1, abs(m.beta))
    assert abs(g - m.gamma) < 1e-8 * max(1, abs(m.gamma))


def test_parametrix_expansion_decays():
    m = asy.parametrix_model(0.11, 0.3 + 0.2j)
    r = [m.expansion_residual(z) for z in (10j, 20j, 40j)]
    assert r[0] > r[1] > r[2]
    assert 1.5 < r[1] / r[2] < 2.5


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 0.5), st.floats(-3, 3))
def test_weber_wronskian(nu, zeta):
    w = asy.weber_wronskian(nu, zeta)
    assert abs(w - asy.weber_wronskian_closed(nu)) < 1e-7


def test_degenerate_jump():
    with pytest.raises(asy.DegenerateJump):
        asy.parametrix_model(0.1, 1.0, q2=-1.0)
