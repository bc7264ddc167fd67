"""Jost solutions and the scattering matrix for step-like data.

The x-part of the Lax pair is phi_x = (-ik sigma3 + U) phi with
U = [[0, u(x)], [-sigma u(-x), 0]].  We integrate psi = phi exp(ikx sigma3),
which satisfies psi_x = -ik [sigma3, psi] + U psi.  Outside [-N, N] the
potential equals its background, so psi_1 = N_minus for x <= -N and
psi_2 = N_plus for x >= N exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .numerics import PanelGrid


class ScatteringError(ValueError):
    pass


class SingularAtOrigin(ScatteringError):
    pass


class TooCloseToOrigin(ScatteringError):
    pass


class OverflowGauge(ScatteringError):
    pass


class NonAnalyticColumnRequest(ScatteringError):
    pass


class SpectralZeroOnRealAxis(ScatteringError):
    pass


class AsymmetricGrid(ScatteringError):
    pass


K_MIN = 1e-3
K_MAX = 50.0
ODE_RTOL = 1e-11
ODE_ATOL = 1e-13
GAUGE_LIMIT = 50.0


@dataclass(frozen=True)
class StepProfile:
    """u0(x) = A H(x) + p(x) with p vanishing for |x| > support_N."""
    A: float
    sigma: int = 1
    support_N: float = 1.0
    perturbation: Optional[Callable] = None
    sampling_step: float = 0.01
    # points inside [-N, N] where u0 (or its mirror) has kinks or jumps
    breakpoints: tuple = ()
    name: str = "custom"

    def __post_init__(self):
        if self.A < 0:
            raise ValueError("background amplitude must be non-negative")
        if self.sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        if self.support_N <= 0:
            raise ValueError("support_N must be positive")

    def u0(self, x):
        x = np.asarray(x, dtype=float)
        u = np.where(x > 0, self.A, 0.0)
        if self.perturbation is not None:
            inside = np.abs(x) <= self.support_N
            p = np.zeros_like(x)
            if np.any(inside):
                p[inside] = self.perturbation(x[inside])
            u = u + p
        return u

    @classmethod
    def from_samples(cls, A, x, p, **kw):
        """Build a profile from a sampled perturbation (linear interpolation)."""
        x = np.asarray(x, float)
        p = np.asarray(p, float)
        N = kw.pop("support_N", float(np.max(np.abs(x))))
        step = kw.pop("sampling_step", float(np.min(np.diff(x))))
        f = lambda s: np.interp(s, x, p, left=0.0, right=0.0)
        return cls(A=A, support_N=N, perturbation=f, sampling_step=step,
                   breakpoints=tuple(x), **kw)


def pure_step(A, sigma=1):
    return StepProfile(A=A, sigma=sigma, support_N=1.0, name="pure-step")


def smooth_step(A, width=0.5, support_N=None):
    """Step smoothed by a tanh transition, truncated to |x| <= support_N."""
    N = 10.0 * width if support_N is None else support_N

    def p(x):
        return 0.5 * A * (1.0 + np.tanh(x / width)) - np.where(x > 0, A, 0.0)

    return StepProfile(A=A, support_N=N, perturbation=p, sampling_step=width / 50,
                       name="smooth-step")


def bump_step(A, height=None, center=1.0, width=0.5):
    """Pure step plus a Gaussian bump truncated at |x - center| > 4 width."""
    c = 0.3 * A if height is None else height
    lo, hi = center - 4 * width, center + 4 * width
    N = max(abs(lo), abs(hi))

    def p(x):
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, c * np.exp(-((x - center) / width) ** 2), 0.0)

    return StepProfile(A=A, support_N=N, perturbation=p, sampling_step=width / 50,
                       breakpoints=(lo, hi), name="bump-step")


# ---------------------------------------------------------------------------
# background solutions
# ---------------------------------------------------------------------------

def n_plus(A, sigma, k):
    k = complex(k)
    return np.array([[1.0, A / (2j * k)], [0.0, 1.0]], dtype=complex)


def n_minus(A, sigma, k):
    k = complex(k)
    return np.array([[1.0, 0.0], [sigma * A / (2j * k), 1.0]], dtype=complex)


def background_solution(A, sigma, k, x, t, side):
    """N_side(k) exp(-(ikx + 4ik^3 t) sigma3)."""
    k = complex(k)
    if abs(k) < 1e-12:
        raise SingularAtOrigin("background solutions are singular at k = 0")
    N = n_plus(A, sigma, k) if side in ("+", 1, "plus") else n_minus(A, sigma, k)
    ph = 1j * k * x + 4j * k ** 3 * t
    return N @ np.diag([np.exp(-ph), np.exp(ph)])


# ---------------------------------------------------------------------------
# Jost solutions
# ---------------------------------------------------------------------------

def _potential(profile):
    s = profile.sigma

    def U(x):
        return profile.u0(np.array([x]))[0], -s * profile.u0(np.array([-x]))[0]

    return U


def _knots(profile, lo, hi):
    pts = {lo, hi, 0.0}
    for b in profile.breakpoints:
        pts.update((b, -b))
    return sorted(p for p in pts if lo <= p <= hi)


def _march(profile, ks, y0, x_from, x_to, cols):
    """Integrate selected columns for all k from x_from to x_to.

    ``cols`` is a list of column indices; y0 has shape (nk, 2, len(cols)).
    Returns the state at x_to with the same shape.
    """
    ks = np.asarray(ks, dtype=complex)
    nk = ks.size
    ncol = len(cols)
    # diagonal rates: col 0 -> diag(0, 2ik); col 1 -> diag(-2ik, 0)
    rate = np.zeros((nk, 2, ncol), dtype=complex)
    for j, c in enumerate(cols):
        if c == 0:
            rate[:, 1, j] = 2j * ks
        else:
            rate[:, 0, j] = -2j * ks
    U = _potential(profile)

    def rhs(x, y):
        Y = y.reshape(nk, 2, ncol)
        up, lo = U(x)
        out = rate * Y
        out[:, 0, :] += up * Y[:, 1, :]
        out[:, 1, :] += lo * Y[:, 0, :]
        return out.ravel()

    y = np.asarray(y0, dtype=complex).ravel()
    knots = _knots(profile, min(x_from, x_to), max(x_from, x_to))
    if x_from > x_to:
        knots = knots[::-1]
    kmax = np.abs(ks).max() if nk else 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        if a == b:
            continue
        sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=ODE_RTOL, atol=ODE_ATOL,
                        first_step=min(abs(b - a), 0.1 / (1.0 + kmax)))
        if not sol.success:
            raise ScatteringError(sol.message)
        y = sol.y[:, -1]
    return y.reshape(nk, 2, ncol)


def _check_gauge(profile, ks):
    im = np.abs(np.imag(np.asarray(ks, dtype=complex)))
    if im.size and im.max() * profile.support_N > GAUGE_LIMIT:
        raise OverflowGauge(f"|Im k| N = {im.max() * profile.support_N:.3g} exceeds {GAUGE_LIMIT}")


def jost_at(profile, ks, x=0.0):
    """Full Jost matrices psi_1(x), psi_2(x) for real k (arrays of shape (nk, 2, 2))."""
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    if np.any(ks.imag != 0):
        raise NonAnalyticColumnRequest("full Jost matrices exist only for real k")
    if np.any(np.abs(ks) < 1e-12):
        raise SingularAtOrigin("Jost solutions are normalised by N(k), singular at k = 0")
    N = profile.support_N
    A, s = profile.A, profile.sigma
    Nm = np.array([n_minus(A, s, k) for k in ks])
    Np = np.array([n_plus(A, s, k) for k in ks])
    psi1 = Nm if x <= -N else _march(profile, ks, Nm, -N, x, [0, 1])
    psi2 = Np if x >= N else _march(profile, ks, Np, N, x, [0, 1])
    return psi1, psi2


def analytic_columns_at(profile, ks, x=0.0):
    """psi_1^(1)(x, k) and psi_2^(2)(x, k) for Im k >= 0, each of shape (nk, 2)."""
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    if np.any(ks.imag < 0):
        raise NonAnalyticColumnRequest("psi_1^(1), psi_2^(2) are analytic only for Im k >= 0")
    if np.any(np.abs(ks) < 1e-12):
        raise SingularAtOrigin("Jost solutions are singular at k = 0")
    _check_gauge(profile, ks)
    N = profile.support_N
    A, s = profile.A, profile.sigma
    c1 = np.array([[1.0, s * A / (2j * k)] for k in ks])[:, :, None]
    c2 = np.array([[A / (2j * k), 1.0] for k in ks])[:, :, None]
    left = c1 if x <= -N else _march(profile, ks, c1, -N, x, [0])
    right = c2 if x >= N else _march(profile, ks, c2, N, x, [1])
    return left[:, :, 0], right[:, :, 0]


@dataclass
class JostSolutions:
    x: np.ndarray
    k: complex
    psi1: np.ndarray  # (nx, 2, 2), or (nx, 2) analytic column only
    psi2: np.ndarray


def jost_solutions(profile, k, x=None, t=0.0, analytic_only=None):
    """Jost solutions on an x-grid (default 201 points on [-N, N]).

    For non-real k only the analytic columns are returned.
    """
    if t != 0.0:
        raise NotImplementedError("spectral data are computed at t = 0")
    k = complex(k)
    if x is None:
        x = np.linspace(-profile.support_N, profile.support_N, 201)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if analytic_only is None:
        analytic_only = k.imag != 0
    if not analytic_only and k.imag != 0:
        raise NonAnalyticColumnRequest("both columns requested at non-real k")
    out1, out2 = [], []
    for xi in x:
        if analytic_only:
            a, b = analytic_columns_at(profile, [k], xi)
        else:
            a, b = jost_at(profile, [k], xi)
        out1.append(a[0])
        out2.append(b[0])
    return JostSolutions(x=x, k=k, psi1=np.array(out1), psi2=np.array(out2))


# ---------------------------------------------------------------------------
# scattering matrix
# ---------------------------------------------------------------------------

@dataclass
class ScatteringSample:
    k: float
    S: np.ndarray
    a1: complex
    a2: complex
    b: complex


@dataclass
class ReflectionSample:
    k: float
    r1: complex
    r2: complex


@dataclass
class ScatteringTable:
    """Scattering data on a set of real k (vectorised counterpart of ScatteringSample)."""
    k: np.ndarray
    S: np.ndarray
    sigma: int = 1

    @property
    def a1(self):
        return self.S[:, 0, 0]

    @property
    def a2(self):
        return self.S[:, 1, 1]

    @property
    def b(self):
        return self.S[:, 1, 0]

    def sample(self, i):
        return ScatteringSample(k=float(self.k[i]), S=self.S[i], a1=self.a1[i],
                                a2=self.a2[i], b=self.b[i])


def _inv2(M):
    out = np.empty_like(M)
    det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    out[:, 0, 0] = M[:, 1, 1]
    out[:, 1, 1] = M[:, 0, 0]
    out[:, 0, 1] = -M[:, 0, 1]
    out[:, 1, 0] = -M[:, 1, 0]
    return out / det[:, None, None]


def scattering_table(profile, ks, x_eval=0.0, k_min=K_MIN):
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    if np.any(np.abs(ks) < k_min):
        raise TooCloseToOrigin(f"|k| below k_min = {k_min}")
    psi1, psi2 = jost_at(profile, ks, x_eval)
    S = _inv2(psi2) @ psi1
    return ScatteringTable(k=ks, S=S, sigma=profile.sigma)


def scattering_matrix(profile, k, x_eval=0.0, k_min=K_MIN):
    """S(k) = psi_2^{-1} psi_1 at (x, t) = (x_eval, 0)."""
    return scattering_table(profile, [k], x_eval, k_min).sample(0)


def pure_step_S(A, k, sigma=1):
    """Closed form N_plus^{-1} N_minus for the pure step."""
    k = np.asarray(k, dtype=complex)
    S = np.empty(k.shape + (2, 2), dtype=complex)
    S[..., 0, 0] = 1 + sigma * A ** 2 / (4 * k ** 2)
    S[..., 0, 1] = -A / (2j * k)
    S[..., 1, 0] = sigma * A / (2j * k)
    S[..., 1, 1] = 1.0
    return S


def reflection_coefficients(sample, floor=1e-12):
    a1, a2, b = np.asarray(sample.a1), np.asarray(sample.a2), np.asarray(sample.b)
    if np.any(np.abs(a1) <= floor) or np.any(np.abs(a2) <= floor):
        raise SpectralZeroOnRealAxis(f"a1 or a2 vanishes near k = {sample.k}")
    return ReflectionSample(k=sample.k, r1=b / a1, r2=b / a2)


def _mirror_index(k, tol=1e-12):
    order = np.argsort(k)
    ks = k[order]
    if not np.allclose(ks, -ks[::-1], atol=tol, rtol=tol):
        raise AsymmetricGrid("k-grid is not symmetric under k -> -k")
    mirror = np.empty_like(order)
    mirror[order] = order[::-1]
    return mirror


def verify_scattering_identities(table, large_k=None):
    """Maximum violations of the algebraic and symmetry identities of S(k)."""
    k = table.k
    m = _mirror_index(k)
    S = table.S
    a1, a2, b = table.a1, table.a2, table.b
    sig = table.sigma
    det = S[:, 0, 0] * S[:, 1, 1] - S[:, 0, 1] * S[:, 1, 0]
    rep = {
        "det_S": float(np.max(np.abs(det - 1))),
        "a1a2_plus_b2": float(np.max(np.abs(a1 * a2 + sig * b ** 2 - 1))),
        "S12_vs_b": float(np.max(np.abs(S[:, 0, 1] + sig * b))),
        "b_symmetry": float(np.max(np.abs(b - np.conj(b[m])))),
        "a1_symmetry": float(np.max(np.abs(a1 - np.conj(a1[m])))),
        "a2_symmetry": float(np.max(np.abs(a2 - np.conj(a2[m])))),
    }
    # trace identity: tr S = a1 + a2 is invariant under the same conjugation
    tr = a1 + a2
    rep["trace_symmetry"] = float(np.max(np.abs(tr - np.conj(tr[m]))))
    big = np.abs(k) >= (large_k if large_k is not None else 0.5 * np.abs(k).max())
    if np.any(big):
        kb = np.abs(k[big])
        rep["large_k_a"] = float(np.max(np.abs(np.concatenate([a1[big] - 1, a2[big] - 1]) *
                                               np.concatenate([kb, kb]))))
        rep["large_k_b"] = float(np.max(np.abs(b[big]) * kb))
    return rep


# ---------------------------------------------------------------------------
# k-grids
# ---------------------------------------------------------------------------

def symmetric_k_grid(k_min=K_MIN, k_max=K_MAX, support_N=1.0, order=16, max_width=0.5):
    """Composite Gauss-Legendre panels on [-k_max, k_max], one panel spanning (-k_min, k_min).

    Panels double in width from k_min up to about 1, then have uniform width
    at most min(max_width, 1.5/N) so the e^{2ikx} oscillation stays resolved.
    """
    edges = [k_min]
    while edges[-1] < 1.0 and edges[-1] < k_max:
        edges.append(min(2 * edges[-1], k_max))
    width = min(max_width, 1.5 / support_N)
    n = int(np.ceil((k_max - edges[-1]) / width))
    if n > 0:
        edges.extend(np.linspace(edges[-1], k_max, n + 1)[1:])
    pos = np.array(edges)
    return PanelGrid(np.concatenate([-pos[::-1], pos]), order)
