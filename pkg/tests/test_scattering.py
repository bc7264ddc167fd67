import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nmkdv import scattering as sc


K = np.concatenate([-np.linspace(0.05, 20, 40)[::-1], np.linspace(0.05, 20, 40)])


@pytest.mark.parametrize("A", [0.5, 1.0, 2.0, 4.0])
def test_pure_step_matches_closed_form(A):
    table = sc.scattering_table(sc.pure_step(A), K)
    ref = sc.pure_step_S(A, K)
    rel = np.max(np.abs(table.S - ref)) / np.max(np.abs(ref))
    assert rel < 1e-8


def test_pure_step_closed_form_entries():
    # A = 2, k = 1: a1 = 2, b = i, a2 = 1
    S = sc.pure_step_S(2.0, 1.0)
    assert np.allclose(S, [[2, 1j], [-1j, 1]], atol=1e-15)


@pytest.mark.parametrize("make", [lambda: sc.pure_step(1.5), lambda: sc.bump_step(1.0),
                                  lambda: sc.smooth_step(1.0)])
def test_algebraic_identities(make):
    rep = sc.verify_scattering_identities(sc.scattering_table(make(), K))
    for key in ("det_S", "a1a2_plus_b2", "S12_vs_b", "b_symmetry", "a1_symmetry", "a2_symmetry"):
        assert rep[key] < 1e-8, key


def test_wronskian_point_only_rotates_gauge():
    # in the psi gauge, moving the evaluation point conjugates S by exp(ikx sigma3)
    p = sc.bump_step(1.0)
    k = np.array([-0.7, 0.4, 3.0])
    x = 0.8
    S0 = sc.scattering_table(p, k, x_eval=0.0).S
    S1 = sc.scattering_table(p, k, x_eval=x).S
    ph = np.exp(2j * k * x)
    assert np.max(np.abs(S1[:, 0, 0] - S0[:, 0, 0])) < 1e-9
    assert np.max(np.abs(S1[:, 1, 1] - S0[:, 1, 1])) < 1e-9
    assert np.max(np.abs(S1[:, 0, 1] - S0[:, 0, 1] / ph)) < 1e-9
    assert np.max(np.abs(S1[:, 1, 0] - S0[:, 1, 0] * ph)) < 1e-9


def test_jost_normalisation_outside_support():
    p = sc.bump_step(1.0)
    k = 1.3
    left = sc.jost_solutions(p, k, x=-p.support_N - 1)
    right = sc.jost_solutions(p, k, x=p.support_N + 1)
    assert np.allclose(left.psi1[0], sc.n_minus(p.A, 1, k), atol=1e-12)
    assert np.allclose(right.psi2[0], sc.n_plus(p.A, 1, k), atol=1e-12)


def test_origin_guards():
    with pytest.raises(sc.TooCloseToOrigin):
        sc.scattering_table(sc.pure_step(1.0), [1e-4])
    with pytest.raises(sc.SingularAtOrigin):
        sc.jost_solutions(sc.pure_step(1.0), 0.0)


def test_non_analytic_column_request():
    with pytest.raises(sc.NonAnalyticColumnRequest):
        sc.jost_solutions(sc.pure_step(1.0), 0.5 + 0.5j, analytic_only=False)


def test_asymmetric_grid_detected():
    table = sc.scattering_table(sc.pure_step(1.0), [0.5, 1.0, -0.5])
    with pytest.raises(sc.AsymmetricGrid):
        sc.verify_scattering_identities(table)


def test_reflection_coefficients():
    sample = sc.scattering_matrix(sc.pure_step(2.0), 1.0)
    rc = sc.reflection_coefficients(sample)
    assert abs(rc.r1 - (-1j) / 2) < 1e-10
    assert abs(rc.r2 - (-1j)) < 1e-10


def test_profile_values():
    p = sc.bump_step(1.0)
    x = np.array([-10.0, -0.5, 0.5, 10.0])
    u = p.u0(x)
    assert u[0] == 0 and u[-1] == 1.0
    assert u[2] > 1.0
    assert sc.smooth_step(2.0).u0(np.array([0.0]))[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        sc.StepProfile(A=1.0, sigma=2)


def test_profile_from_samples_matches_pure_step():
    x = np.linspace(-1, 1, 21)
    p = sc.StepProfile.from_samples(1.0, x, np.zeros_like(x))
    k = np.array([-2.0, 2.0])
    assert np.allclose(sc.scattering_table(p, k).S, sc.pure_step_S(1.0, k), atol=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.1, 10.0))
def test_background_solution_is_normalised(A, k):
    # the x = 0, t = 0 background matrices are N_pm themselves
    left = sc.background_solution(A, 1, k, 0.0, 0.0, "-")
    right = sc.background_solution(A, 1, k, 0.0, 0.0, "+")
    assert np.allclose(left, sc.n_minus(A, 1, k))
    assert np.allclose(right, sc.n_plus(A, 1, k))


def test_symmetric_k_grid():
    grid = sc.symmetric_k_grid(1e-3, 50, support_N=3.0)
    n = grid.nodes
    assert np.allclose(np.sort(n), -np.sort(n)[::-1])
    e = grid.edges
    assert np.max(np.diff(e[e >= 1.1])) <= 0.5 + 1e-12
