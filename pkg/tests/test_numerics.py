import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from nmkdv import numerics as nm


# --- gamma -----------------------------------------------------------------

@pytest.mark.parametrize("z", [0.5, 1.0, 2.5, 7.0, 0.3 + 2j, -0.5 + 0.1j, -3.7, 1e-3j, 5 - 8j])
def test_gamma_matches_scipy(z):
    ref = special.gamma(complex(z))
    assert abs(nm.complex_gamma(z) - ref) <= 1e-13 * abs(ref)


def test_gamma_half_is_sqrt_pi():
    assert abs(nm.complex_gamma(0.5) - math.sqrt(math.pi)) < 1e-14


@pytest.mark.parametrize("n", [0, -1, -2, -7])
def test_gamma_poles_raise(n):
    with pytest.raises(nm.PoleAtNonPositiveInteger):
        nm.complex_gamma(n)
    assert nm.rgamma(n) == 0


@given(st.floats(-6, 6), st.floats(-6, 6))
def test_gamma_reflection(x, y):
    z = complex(x, y)
    if abs(cmath.sin(math.pi * z)) < 1e-3:
        return
    lhs = nm.complex_gamma(z) * nm.complex_gamma(1 - z)
    rhs = math.pi / cmath.sin(math.pi * z)
    assert abs(lhs - rhs) <= 1e-11 * abs(rhs)


@given(st.floats(0.1, 8), st.floats(-8, 8))
def test_gamma_recurrence(x, y):
    z = complex(x, y)
    g = nm.complex_gamma(z)
    assert abs(nm.complex_gamma(z + 1) - z * g) <= 1e-12 * abs(z * g)


def test_gamma_vectorised():
    z = np.array([1.0, 2.0, 3.0, 4.0])
    assert np.allclose(nm.complex_gamma(z), [1, 1, 2, 6], rtol=1e-14)


# --- parabolic cylinder ----------------------------------------------------

def _D_ref(a, z):
    return complex(mpmath.pcfd(a, z))


@pytest.mark.parametrize("a", [0.1j, 0.3j - 0.1, -1 + 0.2j, 0.5, 1j * 0.11])
@pytest.mark.parametrize("z", [0.0, 0.7, 2.5 + 1j, -3 + 0.5j, 6 * cmath.exp(0.25j * math.pi),
                               6 * cmath.exp(-0.75j * math.pi), 12 - 4j, -15j, 30 * cmath.exp(2.5j)])
def test_weber_against_mpmath(a, z):
    ref = _D_ref(a, z)
    got = nm.weber_D(a, z)
    assert abs(got - ref) <= 1e-10 * max(abs(ref), 1e-300)


@pytest.mark.parametrize("z", [0.3, -1.2 + 0.4j, 3j, 5 - 2j])
def test_weber_closed_forms(z):
    g = cmath.exp(-z * z / 4)
    assert abs(nm.weber_D(0, z) - g) < 1e-13 * abs(g)
    assert abs(nm.weber_D(1, z) - z * g) < 1e-13 * abs(z * g)
    # D_{-1}(z) = e^{z^2/4} sqrt(pi/2) erfc(z / sqrt 2)
    ref = cmath.exp(z * z / 4) * math.sqrt(math.pi / 2) * special.erfc(z / math.sqrt(2))
    assert abs(nm.weber_D(-1, z) - ref) < 1e-12 * abs(ref)


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.45, 0.45), st.floats(0.01, 0.6), st.floats(0, 8), st.floats(-math.pi, math.pi))
def test_weber_recurrence_and_derivative(re_nu, im_nu, r, th):
    a = 1j * complex(re_nu, im_nu)
    z = r * cmath.exp(1j * th)
    d0, dp, dm = nm.weber_D(a, z), nm.weber_D(a + 1, z), nm.weber_D(a - 1, z)
    scale = max(abs(dp), abs(z * d0), abs(a * dm), 1e-200)
    assert abs(dp - z * d0 + a * dm) <= 1e-10 * scale
    deriv = nm.weber_D_prime(a, z)
    assert abs(deriv - (z / 2 * d0 - dp)) <= 1e-10 * max(abs(deriv), abs(z * d0), abs(dp))


def test_weber_out_of_range():
    with pytest.raises(nm.OutOfValidatedRange):
        nm.weber_D(0.1j, 60.0)


# --- quadrature ------------------------------------------------------------

@pytest.mark.parametrize("f, a, b, exact", [
    (np.exp, 0.0, 1.0, math.e - 1),
    (lambda s: 1 / (1 + s ** 2), -50.0, 50.0, 2 * math.atan(50)),
    (lambda s: np.sqrt(s), 0.0, 4.0, 16 / 3),
    (lambda s: np.cos(30 * s), 0.0, math.pi / 3, math.sin(10 * math.pi) / 30),
])
def test_adaptive_quad(f, a, b, exact):
    val, err = nm.adaptive_quad(f, a, b, tol=1e-12)
    assert abs(val - exact) < 1e-10
    assert err < 1e-9


def test_principal_value_simple_pole():
    # p.v. int_{-1}^{2} ds / s = log 2
    val = nm.principal_value_integral(lambda s: np.ones_like(s), 0.0, [nm.finite(-1, 2)])
    assert abs(val - math.log(2)) < 1e-12


def test_principal_value_full_line():
    # p.v. int 1/((1+s^2)(s - p)) ds = -pi p / (1 + p^2)
    p = 0.7
    dom = [nm.ray_from_minus_inf(-1), nm.finite(-1, 1), nm.ray_to_plus_inf(1)]
    val = nm.principal_value_integral(lambda s: 1 / (1 + s ** 2), p, dom)
    assert abs(val + math.pi * p / (1 + p * p)) < 1e-9


def test_principal_value_pole_outside():
    with pytest.raises(nm.PoleOutsideDomain):
        nm.principal_value_integral(lambda s: s, 5.0, [nm.finite(0, 1)])


@pytest.mark.parametrize("k", [0.3 + 0.5j, -2 + 0.01j, 1.5 - 0.2j])
def test_cauchy_residue(k):
    # (1/2 pi i) int 1/((1+s^2)(s-k)) ds: close in the half-plane away from k
    dom = [nm.ray_from_minus_inf(-1), nm.finite(-1, 1), nm.ray_to_plus_inf(1)]
    val = nm.cauchy_contour_integral(lambda s: 1 / (1 + s ** 2), k, dom)
    if k.imag > 0:
        # pole at k inside upper half-plane: residue at k plus residue at i
        exact = 1 / (1 + k * k) + 1 / ((2j) * (1j - k))
    else:
        exact = 1 / ((2j) * (1j - k))
    assert abs(val - exact) < 1e-9


def test_cauchy_plemelj_jump():
    dom = [nm.finite(-2, 2)]
    g = lambda s: np.exp(-s ** 2)
    up = nm.cauchy_contour_integral(g, 0.4, dom, side=1)
    dn = nm.cauchy_contour_integral(g, 0.4, dom, side=-1)
    assert abs((up - dn) - math.exp(-0.16)) < 1e-12
    with pytest.raises(nm.EvaluationOnContourWithoutSideFlag):
        nm.cauchy_contour_integral(g, 0.4, dom)


def test_nondecaying_tail():
    with pytest.raises(nm.NonDecayingTail):
        nm.principal_value_integral(lambda s: np.ones_like(s), 0.0,
                                    [nm.ray_from_minus_inf(-1), nm.finite(-1, 1), nm.ray_to_plus_inf(1)])


def test_panel_grid_integrates_and_interpolates():
    grid = nm.PanelGrid(np.linspace(-3, 3, 7), order=16)
    f = np.sin(grid.nodes) * np.exp(grid.nodes / 3)
    s = np.linspace(-2.9, 2.9, 50)
    assert np.max(np.abs(grid.interpolate(f, s) - np.sin(s) * np.exp(s / 3))) < 1e-12
    assert abs(np.sum(grid.weights * grid.nodes ** 2) - 18.0) < 1e-12
