"""Discrete spectrum, Case I/II classification and the delta-function data.

Spectral functions are stored in regularised form, (k^2 a1, a2, k b), which
stays bounded through k = 0 for both cases.  Everything else is derived
from those three quantities.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from . import numerics as nm
from .scattering import (K_MAX, K_MIN, ScatteringError, analytic_columns_at,
                         pure_step, scattering_table, symmetric_k_grid)


class SpectralError(ValueError):
    pass


class AmbiguousClassification(SpectralError):
    pass


class NoSignChange(SpectralError):
    pass


class MultipleZeros(SpectralError):
    pass


class LogBranchJump(SpectralError):
    pass


class ProportionalityViolated(SpectralError):
    pass


class WindingOutOfRange(SpectralError):
    pass


class EndpointDivergence(SpectralError):
    pass


# ---------------------------------------------------------------------------
# spectral functions on the real line
# ---------------------------------------------------------------------------

class Spectrum:
    """Base class; subclasses provide ``regularised(k) -> (k^2 a1, a2, k b)``."""

    sigma = 1

    def regularised(self, k):
        raise NotImplementedError

    def a1(self, k):
        k = np.asarray(k, dtype=float)
        return self.regularised(k)[0] / k ** 2

    def a2(self, k):
        return self.regularised(np.asarray(k, dtype=float))[1]

    def b(self, k):
        k = np.asarray(k, dtype=float)
        return self.regularised(k)[2] / k

    def r1(self, k):
        k = np.asarray(k, dtype=float)
        k2a1, _, kb = self.regularised(k)
        return kb * k / k2a1

    def r2(self, k):
        k = np.asarray(k, dtype=float)
        _, a2, kb = self.regularised(k)
        return kb / (k * a2)

    def one_plus_r1r2(self, k):
        """1 + r1 r2 = 1 + (k b)^2 / (k^2 a1 a2), bounded at k = 0."""
        k2a1, a2, kb = self.regularised(np.asarray(k, dtype=float))
        return 1.0 + self.sigma * kb ** 2 / (k2a1 * a2)

    def at_zero(self):
        """(k^2 a1, a2, k b) at k = 0 and their k-derivatives there."""
        h = 1e-4
        p = np.array(self.regularised(np.array([-2 * h, -h, 0.0, h, 2 * h])))
        val = p[:, 2]
        der = (p[:, 0] - 8 * p[:, 1] + 8 * p[:, 3] - p[:, 4]) / (12 * h)
        return val, der


class ClosedFormSpectrum(Spectrum):
    """Spectrum given by a vectorised callable returning the regularised triple."""

    def __init__(self, regularised, sigma=1, label="closed-form"):
        self._reg = regularised
        self.sigma = sigma
        self.label = label

    def regularised(self, k):
        k = np.asarray(k, dtype=float)
        out = self._reg(k)
        return tuple(np.broadcast_to(np.asarray(v, dtype=complex), k.shape) for v in out)


def pure_step_spectrum(A, sigma=1):
    def reg(k):
        k = k.astype(complex)
        return k ** 2 + sigma * A ** 2 / 4, np.ones_like(k), sigma * A / 2j + 0 * k
    return ClosedFormSpectrum(reg, sigma, "pure-step")


class SampledSpectrum(Spectrum):
    """Panel-interpolated spectrum from scattering on a symmetric Gauss-Legendre grid.

    The panel straddling k = 0 is filled by polynomial interpolation of the
    regularised data through the nearest nodes on both sides.  Beyond k_max
    a_j - 1 and b are continued as c/k.
    """

    def __init__(self, grid, k, values, sigma=1, k_min=K_MIN, n_bridge=6):
        self.grid = grid
        self.sigma = sigma
        self.k_min = k_min
        self.k_max = float(grid.edges[-1])
        self.values = np.array(values, dtype=complex)  # (3, n_nodes)
        center = np.abs(grid.nodes) < k_min
        have = ~center
        # bridge the central panel
        pos = np.where(have & (grid.nodes > 0))[0][:n_bridge]
        neg = np.where(have & (grid.nodes < 0))[0][-n_bridge:]
        idx = np.concatenate([neg, pos])
        xs = grid.nodes[idx] / k_min
        V = np.vander(xs, len(xs), increasing=True)
        coef = np.linalg.solve(V, self.values[:, idx].T)  # (n, 3)
        xc = grid.nodes[center] / k_min
        self.values[:, center] = (np.vander(xc, len(xs), increasing=True) @ coef).T
        self._bridge = coef
        self._edge = self.grid.interpolate(self.values, np.array([-self.k_max, self.k_max]))

    def regularised(self, k):
        k = np.asarray(k, dtype=float)
        flat = k.ravel()
        out = np.empty((3, flat.size), dtype=complex)
        inside = np.abs(flat) <= self.k_max
        if np.any(inside):
            out[:, inside] = self.grid.interpolate(self.values, flat[inside])
        outside = ~inside
        if np.any(outside):
            s = flat[outside]
            side = (s > 0).astype(int)
            e = self._edge[:, side]  # values at +-k_max
            km = np.where(s > 0, self.k_max, -self.k_max)
            ratio = km / s
            a1m1 = e[0] / km ** 2 - 1.0
            out[0, outside] = s ** 2 * (1.0 + a1m1 * ratio)
            out[1, outside] = 1.0 + (e[1] - 1.0) * ratio
            out[2, outside] = e[2]  # k b is asymptotically constant
        return tuple(v.reshape(k.shape) for v in out)


def sample_spectrum(profile, k_min=K_MIN, k_max=K_MAX, order=16):
    grid = symmetric_k_grid(k_min, k_max, profile.support_N, order)
    nodes = grid.nodes
    use = np.abs(nodes) >= k_min
    table = scattering_table(profile, nodes[use], k_min=k_min)
    vals = np.zeros((3, nodes.size), dtype=complex)
    k = table.k
    vals[0, use] = k ** 2 * table.a1
    vals[1, use] = table.a2
    vals[2, use] = k * table.b
    return SampledSpectrum(grid, nodes, vals, profile.sigma, k_min), table


# ---------------------------------------------------------------------------
# discrete spectrum
# ---------------------------------------------------------------------------

def continue_a1(profile, k):
    """a1(k) for Im k >= 0 as the Wronskian of the analytic Jost columns at x = 0."""
    c1, c2 = analytic_columns_at(profile, np.atleast_1d(k))
    w = c1[:, 0] * c2[:, 1] - c1[:, 1] * c2[:, 0]
    return w[0] if np.ndim(k) == 0 else w


def _a1_on_axis(profile, y):
    vals = continue_a1(profile, 1j * np.asarray(y, dtype=float))
    if np.max(np.abs(vals.imag)) > 1e-6 * max(1.0, np.max(np.abs(vals.real))):
        raise SpectralError("a1 is not real on the imaginary axis; symmetry violated")
    return vals.real


def find_kappa_root(profile, k_min=K_MIN, y_max=None, n_scan=160, fd_step=1e-3):
    """Locate the zero i kappa of a1 on the imaginary axis.

    Returns (kappa, a1'(i kappa)); the derivative comes from a 4th-order
    central difference along the axis.
    """
    A = profile.A
    top = 10.0 * A if y_max is None else y_max
    top = min(top, 0.99 * 50.0 / profile.support_N)
    y = np.geomspace(k_min, top, n_scan)
    f = _a1_on_axis(profile, y)
    flips = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]
    if flips.size == 0:
        raise NoSignChange("a1(iy) has no sign change on the scanned interval")
    if flips.size > 1:
        raise MultipleZeros(f"{flips.size} sign changes of a1(iy)")
    i = flips[0]
    g = lambda s: float(_a1_on_axis(profile, [s])[0])
    kappa = brentq(g, y[i], y[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200)
    h = fd_step * max(1.0, kappa)
    pts = kappa + h * np.array([-2, -1, 1, 2])
    fv = _a1_on_axis(profile, pts)
    dy = (fv[0] - 8 * fv[1] + 8 * fv[2] - fv[3]) / (12 * h)
    # Newton polish
    for _ in range(2):
        r = g(kappa)
        if r == 0.0:
            break
        kappa -= r / dy
    residual = abs(continue_a1(profile, 1j * kappa))
    if residual > 1e-10:
        raise SpectralError(f"|a1(i kappa)| = {residual:.2e} after polishing")
    # d/dy a1(iy) = i a1'(iy)
    return kappa, -1j * dy


def count_zeros_upper(profile, half_width=None, y_lo=1e-2, y_hi=None, n=400):
    """Argument-principle count of zeros of a1 inside a rectangle in the upper half-plane."""
    A = profile.A
    X = 10.0 * A if half_width is None else half_width
    Y = min(10.0 * A, 0.99 * 50.0 / profile.support_N) if y_hi is None else y_hi
    m = n // 4
    bottom = np.linspace(-X, X, m, endpoint=False) + 1j * y_lo
    right = X + 1j * np.linspace(y_lo, Y, m, endpoint=False)
    top = np.linspace(X, -X, m, endpoint=False) + 1j * Y
    left = -X + 1j * np.linspace(Y, y_lo, m, endpoint=False)
    path = np.concatenate([bottom, right, top, left, bottom[:1]])
    vals = continue_a1(profile, path)
    dphi = np.angle(vals[1:] / vals[:-1])
    return int(round(dphi.sum() / (2 * math.pi)))


def gamma0_factor(profile, kappa, tol=1e-4):
    c1, c2 = analytic_columns_at(profile, [1j * kappa])
    c1, c2 = c1[0], c2[0]
    r_top = c1[0] / c2[0]
    r_bot = c1[1] / c2[1]
    if abs(r_top - r_bot) > tol * abs(r_top):
        raise ProportionalityViolated(f"column ratios {r_top} vs {r_bot}")
    if abs(r_top ** 2 - 1) > tol:
        raise ProportionalityViolated(f"gamma0^2 = {r_top ** 2}")
    return 1 if r_top.real > 0 else -1


# ---------------------------------------------------------------------------
# Case classification and kappa by formula
# ---------------------------------------------------------------------------

def classify_case(spectrum, eps_case=1e-3, probe=None):
    val, _ = spectrum.at_zero()
    a2_0 = abs(val[1])
    k = np.linspace(-5, 5, 201) if probe is None else probe
    scale = np.max(np.abs(spectrum.a2(k[k != 0])))
    thr = eps_case * scale
    if thr / 2 <= a2_0 <= 2 * thr:
        raise AmbiguousClassification(f"|a2(0)| = {a2_0:.3e} is within a factor 2 of {thr:.3e}")
    return "II" if a2_0 < thr else "I"


_FULL_LINE = [nm.ray_from_minus_inf(-1.0), nm.finite(-1.0, 1.0), nm.ray_to_plus_inf(1.0)]


def _check_branch(F, s):
    ang = np.angle(F)
    unwrapped = np.unwrap(ang)
    if np.max(np.abs(unwrapped - ang)) > 1e-9:
        raise LogBranchJump("argument leaves (-pi, pi]; principal log would jump")


@dataclass
class KappaFormula:
    kappa: float
    imag_residue: float
    case: str
    I1: Optional[complex] = None
    I2: Optional[complex] = None
    b0: Optional[complex] = None


def kappa_by_formula(spectrum, A, case, tol=1e-11):
    s_chk = np.concatenate([-np.geomspace(1e3, 1e-6, 4000), np.geomspace(1e-6, 1e3, 4000)])
    sig = spectrum.sigma
    if case == "I":
        def G(s):
            _, _, kb = spectrum.regularised(s)
            return (s ** 2 - sig * kb ** 2) / (1 + s ** 2)
        _check_branch(G(s_chk), s_chk)
        f = lambda s: np.log(G(s))
        pv = nm.principal_value_integral(f, 0.0, _FULL_LINE, tol=tol)
        expo = -pv / (2j * math.pi)
        kap = 0.5 * A * np.exp(expo)
        return KappaFormula(kappa=float(kap.real), imag_residue=float(abs(kap.imag)), case="I")
    # Case II
    val, der = spectrum.at_zero()
    b0 = der[2]  # k b = b(0) k + ...
    def H(s):
        _, _, kb = spectrum.regularised(s)
        with np.errstate(invalid="ignore", divide="ignore"):
            b = np.where(s == 0, b0, kb / np.where(s == 0, 1, s))
        return 1 - sig * b ** 2
    _check_branch(H(s_chk), s_chk)
    f = lambda s: np.log(H(s))
    pv = nm.principal_value_integral(f, 0.0, _FULL_LINE, tol=tol)
    I1 = np.exp(pv / (2j * math.pi))
    I2 = np.exp(0.5 * np.log(1 - sig * b0 ** 2))
    kap = A * (np.sqrt(b0 ** 2 + I2 ** 2) - b0) / (2 * I1 * I2)
    return KappaFormula(kappa=float(kap.real), imag_residue=float(abs(kap.imag)), case="II",
                        I1=complex(I1), I2=complex(I2), b0=complex(b0))


# ---------------------------------------------------------------------------
# SpectralData
# ---------------------------------------------------------------------------

@dataclass
class SpectralData:
    spectrum: Spectrum
    A: float
    kappa: float
    gamma0: int
    a1_prime_at_pole: complex
    case: str
    sigma: int = 1
    a11: Optional[complex] = None
    a2_prime_0: Optional[complex] = None
    a2_at_0: Optional[complex] = None
    b_at_0: Optional[complex] = None
    table: object = None
    label: str = ""


def build_spectral_data(profile, k_min=K_MIN, k_max=K_MAX, order=16, eps_case=1e-3,
                        zero_count_check=False):
    spectrum, table = sample_spectrum(profile, k_min, k_max, order)
    kappa, a1p = find_kappa_root(profile, k_min)
    if zero_count_check:
        nz = count_zeros_upper(profile)
        if nz != 1:
            raise MultipleZeros(f"argument principle counts {nz} zeros of a1")
    g0 = gamma0_factor(profile, kappa)
    case = classify_case(spectrum, eps_case)
    val, der = spectrum.at_zero()
    extra = {}
    if case == "I":
        extra["a2_at_0"] = complex(val[1])
    else:
        extra["a11"] = complex(der[0])       # k^2 a1 = a11 k + ...
        extra["a2_prime_0"] = complex(der[1])
        extra["b_at_0"] = complex(der[2])
    return SpectralData(spectrum=spectrum, A=profile.A, kappa=kappa, gamma0=g0,
                        a1_prime_at_pole=complex(a1p), case=case, sigma=profile.sigma,
                        table=table, label=profile.name, **extra)


def pure_step_spectral_data(A, sigma=1, eps_case=1e-3):
    """SpectralData of the pure step from the closed form; only gamma0 touches the ODE."""
    spectrum = pure_step_spectrum(A, sigma)
    kappa = A / 2
    # a1 = 1 + A^2/(4k^2), so a1'(i kappa) = -A^2 / (2 (i kappa)^3) = -4i/A
    g0 = gamma0_factor(pure_step(A, sigma), kappa)
    case = classify_case(spectrum, eps_case)
    val, der = spectrum.at_zero()
    extra = {"a2_at_0": complex(val[1])} if case == "I" else {
        "a11": complex(der[0]), "a2_prime_0": complex(der[1]), "b_at_0": complex(der[2])}
    return SpectralData(spectrum=spectrum, A=A, kappa=kappa, gamma0=g0,
                        a1_prime_at_pole=-4j / A, case=case, sigma=sigma,
                        label="pure-step", **extra)


# ---------------------------------------------------------------------------
# delta function, nu, chi
# ---------------------------------------------------------------------------

S_MAX = nm.S_MAX


class ContourLog:
    """Contour-continuous log(1 + r1 r2) on (-inf, -k0) U (k0, inf).

    The argument is unwrapped along each ray starting from its far end, where
    it is anchored at the principal value (close to 0).
    """

    def __init__(self, spectrum, k0, n_fine=12000, n_far=400):
        self.spectrum = spectrum
        self.k0 = k0
        near = np.linspace(k0, max(60.0, 4 * k0), n_fine)
        far = np.geomspace(near[-1], S_MAX, n_far)[1:]
        s = np.concatenate([near, far])
        self.nodes = s
        self._off_r = self._offsets(s)
        self._off_l = self._offsets(-s)

    def _offsets(self, s):
        F = self.spectrum.one_plus_r1r2(s)
        ang = np.angle(F)
        unwrapped = np.unwrap(ang[::-1])[::-1]
        unwrapped -= 2 * math.pi * round(unwrapped[-1] / (2 * math.pi))
        return np.round((unwrapped - ang) / (2 * math.pi))

    def arg(self, s):
        s = np.asarray(s, dtype=float)
        F = self.spectrum.one_plus_r1r2(s)
        a = np.abs(s)
        j = np.clip(np.searchsorted(self.nodes, a), 0, self.nodes.size - 1)
        j0 = np.clip(j - 1, 0, self.nodes.size - 1)
        pick = np.where(np.abs(self.nodes[j0] - a) < np.abs(self.nodes[j] - a), j0, j)
        off = np.where(s > 0, self._off_r[pick], self._off_l[pick])
        return np.angle(F) + 2 * math.pi * off, F

    def __call__(self, s):
        ang, F = self.arg(s)
        return np.log(np.abs(F)) + 1j * ang

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        h = 1e-4 * np.maximum(1.0, np.abs(s))
        F = self.spectrum.one_plus_r1r2
        dF = (F(s - 2 * h) - 8 * F(s - h) + 8 * F(s + h) - F(s + 2 * h)) / (12 * h)
        return dF / F(s)


def nu_at(spectrum, k0, log=None):
    """nu(-k0) and Delta(-k0) = arg(1 + r1 r2) at -k0, continued from s = -inf."""
    L = ContourLog(spectrum, k0) if log is None else log
    ang, F = L.arg(np.array([-k0]))
    Delta = float(ang[0])
    if not -math.pi < Delta < math.pi:
        raise WindingOutOfRange(f"Delta(-k0) = {Delta:.4f} outside (-pi, pi)")
    nu = -math.log(abs(F[0])) / (2 * math.pi) - 1j * Delta / (2 * math.pi)
    if not -0.5 < nu.imag < 0.5:
        raise WindingOutOfRange(f"Im nu = {nu.imag} outside (-1/2, 1/2)")
    return complex(nu), Delta


def _rays(k0):
    return [nm.ray_from_minus_inf(-k0), nm.ray_to_plus_inf(k0)]


@dataclass
class DeltaCache:
    xi: float
    k0: float
    nu: complex
    Delta: float
    delta_at_0: complex
    delta_at_ikappa: complex
    chi_at_minus_k0: complex
    chi_hat_at_minus_k0: complex
    spectrum: Spectrum = field(repr=False, default=None)
    log: ContourLog = field(repr=False, default=None)
    tol: float = 1e-10

    def delta(self, k, side=None):
        return delta_at(k, self, side)

    def r1(self):
        return complex(self.spectrum.r1(np.array([-self.k0]))[0])

    def r2(self):
        return complex(self.spectrum.r2(np.array([-self.k0]))[0])

    def record(self):
        return {"xi": self.xi, "k0": self.k0, "nu_re": self.nu.real, "nu_im": self.nu.imag,
                "Delta": self.Delta, "delta0_re": self.delta_at_0.real,
                "delta0_im": self.delta_at_0.imag, "chi_re": self.chi_at_minus_k0.real,
                "chi_im": self.chi_at_minus_k0.imag}


def delta_at(k, cache, side=None):
    """delta(k) = exp{(1/2 pi i) int_Sigma log(1 + r1 r2)(s) / (s - k) ds}."""
    if cache.log is None:
        return 1.0 + 0j
    L = cache.log
    c = nm.cauchy_contour_integral(L, k, _rays(cache.k0), side=side, tol=cache.tol)
    return complex(np.exp(c))


def chi_hat_at(k, k0, log, tol=1e-10):
    """chi_hat(k) = -(1/2 pi i) int_Sigma log(k - s) dL(s), principal log.

    Integrated by parts against L(s) - L(endpoint) on each ray, which keeps
    the integrand bounded when k is the ray endpoint.  Beyond |s| = S_MAX
    the contribution is added assuming L ~ s^-2.
    """
    k = complex(k)
    S = S_MAX
    Lr0, LrS, Ll0, LlS = log(np.array([k0, S, -k0, -S]))
    total = 0j
    # right ray, finite part
    g = lambda s: (log(s) - Lr0) / (s - k)
    total += np.log(k - S) * (LrS - Lr0) - _split_quad(g, k0, S, k, tol)
    # right tail
    total += -np.log(k - S) * LrS - LrS * nm._tail_series(k, S, 2.0)
    # left ray, finite part
    g = lambda s: (log(s) - Ll0) / (s - k)
    total += -np.log(k + S) * (LlS - Ll0) - _split_quad(g, -S, -k0, k, tol)
    # left tail
    total += np.log(k + S) * LlS + LlS * nm._tail_series(-k, S, 2.0)
    return -total / (2j * math.pi)


def _split_quad(g, a, b, k, tol):
    pts = [a, b]
    if a < k.real < b and abs(k.imag) < 1:
        pts = [a, k.real, b]
    out = 0j
    for lo, hi in zip(pts[:-1], pts[1:]):
        out += nm.adaptive_quad(g, lo, hi, tol, 400_000)[0]
    return out


def build_delta_cache(spectral, xi, tol=1e-10):
    """Assemble nu, Delta, delta(0), delta(i kappa), chi and chi_hat at -k0 for the ray xi < 0."""
    if xi >= 0:
        raise ValueError("delta data are defined for xi < 0")
    k0 = math.sqrt(-xi)
    spectrum = spectral.spectrum if isinstance(spectral, SpectralData) else spectral
    kappa = spectral.kappa if isinstance(spectral, SpectralData) else None
    F_end = spectrum.one_plus_r1r2(np.array([-k0, k0]))
    if np.min(np.abs(F_end)) < 1e-10:
        raise EndpointDivergence("1 + r1 r2 vanishes at the saddle point")
    # reflectionless data short-circuit to exact values
    probe = np.concatenate([np.linspace(k0, k0 + 50, 2001), np.geomspace(k0 + 50, S_MAX, 200)])
    F_probe = spectrum.one_plus_r1r2(np.concatenate([probe, -probe]))
    if np.all(F_probe == 1.0):
        return DeltaCache(xi=xi, k0=k0, nu=0j, Delta=0.0, delta_at_0=1 + 0j,
                          delta_at_ikappa=1 + 0j, chi_at_minus_k0=0j,
                          chi_hat_at_minus_k0=0j, spectrum=spectrum, log=None, tol=tol)
    L = ContourLog(spectrum, k0)
    nu, Delta = nu_at(spectrum, k0, L)
    cache = DeltaCache(xi=xi, k0=k0, nu=nu, Delta=Delta, delta_at_0=0j, delta_at_ikappa=0j,
                       chi_at_minus_k0=0j, chi_hat_at_minus_k0=0j, spectrum=spectrum, log=L, tol=tol)
    cache.delta_at_0 = delta_at(0.0, cache)
    if kappa is not None:
        cache.delta_at_ikappa = delta_at(1j * kappa, cache)
    ch = chi_hat_at(-k0, k0, L, tol)
    cache.chi_hat_at_minus_k0 = complex(ch)
    cache.chi_at_minus_k0 = complex(ch + (Delta / math.pi) * (math.log(2 * k0) + 1j * math.pi))
    return cache


def write_delta_jsonl(caches, path):
    with open(path, "w") as fh:
        for c in caches:
            fh.write(json.dumps(c.record(), sort_keys=False) + "\n")
