"""Sector classification and evaluation of the long-time asymptotic formulas.

Two sign corrections relative to the literal printed constants are applied
here, see ``gamma_literal`` and ``u_literal`` in the returned parameters:

* gamma = nu / beta.  This is the value that makes the explicit Weber-function
  model m0 have the jump and large-zeta expansion it is built for.
* the R_III_R profile is 4 / (A kappa^-2 - C2 E), the (x, t) -> (-x, -t)
  image of the R_I_L profile.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import complex_gamma, weber_D, weber_D_prime


class AsymptoticsError(ValueError):
    pass


class OnTimeAxis(AsymptoticsError):
    pass


class WrongSector(AsymptoticsError):
    pass


class NuOutOfRange(AsymptoticsError):
    pass


class SingularDenominator(AsymptoticsError):
    pass


class DegenerateJump(AsymptoticsError):
    pass


SECTORS = ("R_I_L", "R_I_M", "R_I_R", "R_II", "R_III_L", "R_III_M", "R_III_R", "R_IV", "Boundary")


def phase_and_saddles(k, xi):
    """theta(k, xi) = 4k^3 + 12 k xi and its two stationary points."""
    theta = 4 * k ** 3 + 12 * k * xi
    if xi < 0:
        r = math.sqrt(-xi)
        return theta, (r, -r)
    r = math.sqrt(xi)
    return theta, (1j * r, -1j * r)


def classify_sector(x, t, kappa, tol=1e-9):
    if t == 0:
        raise OnTimeAxis("t = 0 has no sector")
    xi = x / (12.0 * t)
    lo, hi = kappa ** 2 / 3, kappa ** 2
    if abs(xi) <= tol or abs(xi - lo) <= tol or abs(xi - hi) <= tol:
        return "Boundary"
    if x < 0 < t:
        return "R_II"
    if t < 0 < x:
        return "R_IV"
    if t > 0:
        return "R_I_L" if xi < lo else ("R_I_M" if xi < hi else "R_I_R")
    return "R_III_R" if xi < lo else ("R_III_M" if xi < hi else "R_III_L")


@dataclass
class AsymptoticParams:
    xi: float
    k0: float = math.nan
    eta: float = math.nan
    rho: float = math.nan
    tau: float = math.nan
    nu: complex = 0j
    phi0: complex = 0j
    beta: complex = 0j
    gamma: complex = 0j
    gamma_literal: complex = 0j
    q1: complex = 0j
    q2: complex = 0j
    C1: complex = 0j
    C2: complex = 0j
    alpha: float = math.nan
    lam: float = math.nan
    kappa_delta: float = math.nan
    epsilon: float = math.nan
    delta0: complex = 1 + 0j
    c0: complex = 0j
    u_literal: Optional[float] = None


@dataclass
class AsymptoticResult:
    x: float
    t: float
    sector: str
    u_leading: float
    u_subleading: float
    u_total: float
    error_order: str
    error_exponent: float
    params: AsymptoticParams = field(repr=False, default=None)

    def __post_init__(self):
        for name in ("x", "t", "u_leading", "u_subleading", "u_total", "error_exponent"):
            setattr(self, name, float(getattr(self, name)))

    def record(self):
        return {"x": self.x, "t": self.t, "xi": self.x / (12 * self.t), "sector": self.sector,
                "u_leading": self.u_leading, "u_subleading": self.u_subleading,
                "u_total": self.u_total, "error_order_exponent": self.error_exponent}


def _rpow(base, expo):
    # base > 0 by construction, so exp(log(base) * expo) is unambiguous
    return cmath.exp(math.log(base) * expo)


def beta_from_q1(nu, q1):
    return (math.sqrt(2 * math.pi) * cmath.exp(1j * math.pi / 4) * cmath.exp(-math.pi * nu / 2)
            / (q1 * complex_gamma(-1j * nu)))


def gamma_literal_from_q2(nu, q2):
    return (math.sqrt(2 * math.pi) * cmath.exp(-1j * math.pi / 4) * cmath.exp(-math.pi * nu / 2)
            / (q2 * complex_gamma(1j * nu)))


def soliton_constants(spectral):
    """C1 = A gamma0 / (2i a1'(i kappa) kappa^2), C2 = 2i a1'(i kappa) / gamma0."""
    A, k, g0, a1p = spectral.A, spectral.kappa, spectral.gamma0, spectral.a1_prime_at_pole
    return A * g0 / (2j * a1p * k ** 2), 2j * a1p / g0


def asym_params(xi, t, spectral, cache=None, alpha=None, kappa_delta=None):
    p = AsymptoticParams(xi=xi)
    kappa = spectral.kappa
    p.kappa_delta = kappa / 2 if kappa_delta is None else kappa_delta
    if not 0 < p.kappa_delta < kappa:
        raise ValueError("kappa_delta must lie in (0, kappa)")
    p.C1, p.C2 = soliton_constants(spectral)
    if xi >= 0:
        return p
    k0 = math.sqrt(-xi)
    p.k0 = k0
    p.eta = k0 / 2
    p.rho = p.eta * math.sqrt(48 * k0)
    p.tau = -12 * t * k0 ** 3
    p.phi0 = 16j * k0 ** 3
    p.epsilon = min(k0 / 2, abs(1j * kappa + k0) / 2)
    if cache is None:
        raise ValueError("a DeltaCache is required for xi < 0")
    nu = cache.nu
    if not -0.5 < nu.imag < 0.5:
        raise NuOutOfRange(f"Im nu = {nu.imag}")
    p.lam = max(0.5, 2 * abs(nu.imag))
    p.alpha = (p.lam + 1) / 2 if alpha is None else alpha
    if not p.lam < p.alpha < 1:
        raise ValueError(f"alpha must lie in ({p.lam}, 1)")
    p.delta0 = cache.delta_at_0
    p.c0 = spectral.A * cache.delta_at_0 ** 2 / 2j
    if cache.log is None:
        return p  # reflectionless: nu = 0, beta = gamma = 0
    r1, r2 = cache.r1(), cache.r2()
    if abs(r1 * r2) < 1e-14:
        return p
    p.nu = nu
    chi = cache.chi_at_minus_k0
    l4 = math.log(4.0)
    p.q1 = cmath.exp(-2 * chi) * r1 * cmath.exp(2j * nu * l4)
    p.q2 = cmath.exp(2 * chi) * r2 * cmath.exp(-2j * nu * l4)
    p.beta = beta_from_q1(nu, p.q1)
    p.gamma = nu / p.beta
    p.gamma_literal = gamma_literal_from_q2(nu, p.q2)
    return p


def _r1_exponent(alpha, im_nu, flip=False):
    base = -(1 + alpha) / 2
    neg = im_nu < 0
    return base + (2 * abs(im_nu) if (neg != flip) else 0.0)


def evaluate_RII(x, t, spectral, cache, alpha=None, kappa_delta=None):
    if not (x < 0 < t):
        raise WrongSector("R_II needs x < 0 < t")
    xi = x / (12 * t)
    p = asym_params(xi, t, spectral, cache, alpha, kappa_delta)
    mt = -p.tau
    nu = p.nu
    amp = _rpow(mt, -0.5 - nu.imag).real
    osc = p.gamma * cmath.exp(t * p.phi0) * _rpow(mt, 1j * nu.real)
    sub = -4 * p.eta * amp * osc.real
    ex = _r1_exponent(p.alpha, nu.imag)
    order = f"O(eps (-tau)^{ex:.6g})"
    return AsymptoticResult(x, t, "R_II", 0.0, sub, sub, order, ex, p)


def riv_branch(im_nu, alpha):
    if im_nu <= -alpha / 6:
        return "II.a"
    if im_nu < alpha / 6:
        return "II.b"
    return "II.c"


def evaluate_RIV(x, t, spectral, cache, alpha=None, kappa_delta=None):
    if not (t < 0 < x):
        raise WrongSector("R_IV needs t < 0 < x")
    xi = x / (12 * t)
    p = asym_params(xi, t, spectral, cache, alpha, kappa_delta)
    tau = p.tau
    nu = p.nu
    lead = (spectral.A * p.delta0 ** 2).real
    branch = riv_branch(nu.imag, p.alpha)
    sub = 0.0
    if branch in ("II.a", "II.b"):
        coef = -(4 * p.c0 ** 2 / p.k0 ** 2) * p.eta * _rpow(tau, -0.5 - nu.imag)
        osc = 1j * p.gamma * cmath.exp(t * p.phi0) * _rpow(tau, 1j * nu.real)
        sub += (coef * osc.real).real
    if branch in ("II.b", "II.c"):
        amp = 4 * p.eta * _rpow(tau, -0.5 + nu.imag).real
        osc = p.beta * cmath.exp(-t * p.phi0) * _rpow(tau, -1j * nu.real)
        sub += amp * osc.real
    base = -(1 + p.alpha) / 2
    if branch == "II.a":
        ex = _r1_exponent(p.alpha, nu.imag)
    elif branch == "II.c":
        ex = _r1_exponent(p.alpha, nu.imag, flip=True)
    else:
        ex = base + (2 * abs(nu.imag) if nu.imag != 0 else 0.0)
    order = f"O(eps tau^{ex:.6g}) [{branch}]"
    return AsymptoticResult(x, t, "R_IV", lead, sub, lead + sub, order, ex, p)


def _effective_power(t, log_order):
    # report an order t^p e^q as the single exponent of |t|
    return log_order / math.log(abs(t)) if abs(t) != 1 else math.nan


def evaluate_RI(x, t, spectral, kappa_delta=None):
    sector = classify_sector(x, t, spectral.kappa)
    if sector not in ("R_I_L", "R_I_M", "R_I_R"):
        raise WrongSector(f"({x}, {t}) lies in {sector}")
    xi = x / (12 * t)
    p = asym_params(xi, t, spectral, None, kappa_delta=kappa_delta)
    A, k = spectral.A, spectral.kappa
    if sector == "R_I_R":
        kd = p.kappa_delta
        log_ord = -0.5 * math.log(t) - 8 * t * kd * (3 * xi - kd ** 2)
        order = "O(t^-1/2 exp(-8 t kappa_delta (3 xi - kappa_delta^2)))"
        return AsymptoticResult(x, t, sector, float(A), 0.0, float(A), order,
                                _effective_power(t, log_ord), p)
    log_ord = -0.5 * math.log(t) - 16 * t * xi ** 1.5
    order = "O(t^-1/2 exp(-16 t xi^3/2))"
    if sector == "R_I_M":
        return AsymptoticResult(x, t, sector, float(A), 0.0, float(A), order,
                                _effective_power(t, log_ord), p)
    e = -2 * k * x + 8 * k ** 3 * t
    if e > 700:
        u = 0.0
    elif e < -700:
        u = float(A)
    else:
        den = 1 - p.C1 * math.exp(e)
        if abs(den) < 1e-12:
            raise SingularDenominator("1 - C1 exp(...) vanishes")
        u = (A / den).real
    return AsymptoticResult(x, t, sector, u, 0.0, u, order, _effective_power(t, log_ord), p)


def evaluate_RIII(x, t, spectral, kappa_delta=None):
    sector = classify_sector(x, t, spectral.kappa)
    if sector not in ("R_III_L", "R_III_M", "R_III_R"):
        raise WrongSector(f"({x}, {t}) lies in {sector}")
    xi = x / (12 * t)
    p = asym_params(xi, t, spectral, None, kappa_delta=kappa_delta)
    A, k = spectral.A, spectral.kappa
    mt = -t
    if sector == "R_III_L":
        kd = p.kappa_delta
        log_ord = -0.5 * math.log(mt) + 8 * t * kd * (3 * xi - kd ** 2)
        order = "O((-t)^-1/2 exp(8 t kappa_delta (3 xi - kappa_delta^2)))"
        return AsymptoticResult(x, t, sector, 0.0, 0.0, 0.0, order,
                                _effective_power(t, log_ord), p)
    log_ord = -0.5 * math.log(mt) + 16 * t * xi ** 1.5
    order = "O((-t)^-1/2 exp(16 t xi^3/2))"
    if sector == "R_III_M":
        return AsymptoticResult(x, t, sector, 0.0, 0.0, 0.0, order,
                                _effective_power(t, log_ord), p)
    e = -2 * k * x + 8 * k ** 3 * t
    if e > 700:
        u, lit = 0.0, 0.0
    elif e < -700:
        u, lit = float(A), -float(A)
    else:
        E = math.exp(e)
        den = A / k ** 2 - p.C2 * E
        if abs(den) < 1e-12:
            raise SingularDenominator("A kappa^-2 - C2 exp(...) vanishes")
        u = (4 / den).real
        lit = (4 / (p.C2 * E - A / k ** 2)).real
    p.u_literal = lit
    return AsymptoticResult(x, t, sector, u, 0.0, u, order, _effective_power(t, log_ord), p)


def evaluate(x, t, spectral, cache=None, alpha=None, kappa_delta=None):
    """Dispatch to the evaluator of the sector containing (x, t)."""
    sector = classify_sector(x, t, spectral.kappa)
    if sector == "Boundary":
        return AsymptoticResult(x, t, sector, math.nan, math.nan, math.nan, "none", math.nan)
    if sector == "R_II":
        return evaluate_RII(x, t, spectral, cache, alpha, kappa_delta)
    if sector == "R_IV":
        return evaluate_RIV(x, t, spectral, cache, alpha, kappa_delta)
    if sector.startswith("R_III"):
        return evaluate_RIII(x, t, spectral, kappa_delta)
    return evaluate_RI(x, t, spectral, kappa_delta)


# ---------------------------------------------------------------------------
# parabolic-cylinder local model
# ---------------------------------------------------------------------------

_S3 = np.diag([1.0, -1.0]).astype(complex)


@dataclass
class ParametrixModel:
    nu: complex
    q1: complex
    q2: complex
    beta: complex
    gamma: complex

    def _entries(self, zeta, upper, deriv=False):
        nu = self.nu
        if upper:
            c11, c12, c21, c22 = (cmath.exp(-3j * math.pi / 4), cmath.exp(-1j * math.pi / 4),
                                  cmath.exp(-3j * math.pi / 4), cmath.exp(-1j * math.pi / 4))
            f11 = cmath.exp(-3 * math.pi * nu / 4)
            f12 = cmath.exp(math.pi / 4 * (nu - 1j))
            f21 = cmath.exp(-3 * math.pi / 4 * (nu + 1j))
            f22 = cmath.exp(math.pi * nu / 4)
        else:
            c11, c12, c21, c22 = (cmath.exp(1j * math.pi / 4), cmath.exp(3j * math.pi / 4),
                                  cmath.exp(1j * math.pi / 4), cmath.exp(3j * math.pi / 4))
            f11 = cmath.exp(math.pi * nu / 4)
            f12 = cmath.exp(-3 * math.pi / 4 * (nu - 1j))
            f21 = cmath.exp(math.pi / 4 * (nu + 1j))
            f22 = cmath.exp(-3 * math.pi * nu / 4)
        D = (lambda a, z: weber_D_prime(a, z)) if deriv else weber_D
        g11 = c11 if deriv else 1.0
        g12 = c12 if deriv else 1.0
        g21 = c21 if deriv else 1.0
        g22 = c22 if deriv else 1.0
        m = np.empty((2, 2), dtype=complex)
        m[0, 0] = f11 * g11 * D(1j * nu, c11 * zeta)
        m[1, 1] = f22 * g22 * D(-1j * nu, c22 * zeta)
        if nu == 0:
            m[0, 1] = m[1, 0] = 0.0
        else:
            # i nu / gamma = i beta
            m[0, 1] = -1j * self.beta * f12 * g12 * D(-1j * nu - 1, c12 * zeta)
            m[1, 0] = 1j * nu / self.beta * f21 * g21 * D(1j * nu - 1, c21 * zeta)
        return m

    def m0(self, zeta, half_plane=None):
        zeta = complex(zeta)
        upper = zeta.imag > 0 if half_plane is None else half_plane in ("+", 1, "upper")
        return self._entries(zeta, upper)

    def m0_prime(self, zeta, half_plane=None):
        zeta = complex(zeta)
        upper = zeta.imag > 0 if half_plane is None else half_plane in ("+", 1, "upper")
        return self._entries(zeta, upper, deriv=True)

    @property
    def J0(self):
        return np.array([[1 + self.q1 * self.q2, self.q2], [self.q1, 1.0]], dtype=complex)

    def jump(self, zeta):
        return np.linalg.solve(self.m0(zeta, "-"), self.m0(zeta, "+"))

    def jump_residual(self, zeta):
        return float(np.max(np.abs(self.jump(zeta) - self.J0)))

    def beta_gamma_from_ode(self, zeta, half_plane=None):
        """(m0' + (i zeta/2) sigma3 m0) m0^-1 is the constant [[0, beta], [gamma, 0]]."""
        m = self.m0(zeta, half_plane)
        dm = self.m0_prime(zeta, half_plane)
        M = (dm + 0.5j * complex(zeta) * _S3 @ m) @ np.linalg.inv(m)
        return M[0, 1], M[1, 0], M

    def expansion_residual(self, zeta):
        """|| zeta (m_pc - I) - i [[0, -beta], [gamma, 0]] ||, O(1/zeta) for large zeta.

        Valid on the imaginary-axis sectors where the lens factor is the identity.
        """
        zeta = complex(zeta)
        nu = self.nu
        m = self.m0(zeta)
        right = np.diag([cmath.exp(-1j * nu * cmath.log(zeta) + 0.25j * zeta ** 2),
                         cmath.exp(1j * nu * cmath.log(zeta) - 0.25j * zeta ** 2)])
        mpc = m @ right
        target = 1j * np.array([[0, -self.beta], [self.gamma, 0]])
        return float(np.max(np.abs(zeta * (mpc - np.eye(2)) - target)))


def parametrix_model(nu, q1, q2=None):
    """Local Weber-function model with jump [[1 + q1 q2, q2], [q1, 1]] on the real line.

    When q2 is omitted it is fixed by 1 + q1 q2 = exp(-2 pi nu).
    """
    nu = complex(nu)
    q1 = complex(q1)
    if nu == 0:
        return ParametrixModel(0j, 0j, 0j, 0j, 0j)
    if q2 is None:
        q2 = (cmath.exp(-2 * math.pi * nu) - 1) / q1
    q2 = complex(q2)
    if abs(1 + q1 * q2) < 1e-10:
        raise DegenerateJump("1 + q1 q2 vanishes")
    beta = beta_from_q1(nu, q1)
    return ParametrixModel(nu, q1, q2, beta, nu / beta)


def weber_wronskian(nu, zeta):
    """Wr_zeta(D_{i nu}(e^{i pi/4} zeta), D_{i nu}(e^{-3i pi/4} zeta))."""
    a = 1j * complex(nu)
    c1 = cmath.exp(1j * math.pi / 4)
    c2 = cmath.exp(-3j * math.pi / 4)
    f, g = weber_D(a, c1 * zeta), weber_D(a, c2 * zeta)
    df, dg = c1 * weber_D_prime(a, c1 * zeta), c2 * weber_D_prime(a, c2 * zeta)
    return f * dg - df * g


def weber_wronskian_closed(nu):
    return math.sqrt(2 * math.pi) * cmath.exp(1j * math.pi / 4) / complex_gamma(-1j * complex(nu))
