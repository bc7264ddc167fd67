"""Complex special functions and quadrature kernels.

Everything here is a pure function of its arguments.  Complex logarithms and
powers use the principal branch, arg in (-pi, pi].
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np


class NumericsError(ValueError):
    pass


class PoleAtNonPositiveInteger(NumericsError):
    pass


class OutOfValidatedRange(NumericsError):
    pass


class NonDecayingTail(NumericsError):
    pass


class PoleOutsideDomain(NumericsError):
    pass


class EvaluationOnContourWithoutSideFlag(NumericsError):
    pass


class QuadratureError(NumericsError):
    pass


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------

# Lanczos coefficients, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_P = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_loggamma(z):
    # valid for Re z >= 0.5
    z = z - 1.0
    x = _LANCZOS_P[0] + sum(_LANCZOS_P[i] / (z + i) for i in range(1, 9))
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def complex_gamma(z):
    """Gamma function for complex arguments (scalar or array).

    Lanczos approximation for Re z >= 1/2, reflection formula below that.
    """
    z = np.asarray(z, dtype=complex)
    near = np.abs(z - np.round(z.real)) < 1e-12
    if np.any(near & (np.round(z.real) <= 0)):
        raise PoleAtNonPositiveInteger(f"Gamma has a pole at {z[near].ravel()[0]}")
    out = np.empty_like(z)
    right = z.real >= 0.5
    if np.any(right):
        out[right] = np.exp(_lanczos_loggamma(z[right]))
    left = ~right
    if np.any(left):
        zl = z[left]
        out[left] = np.pi / (np.sin(np.pi * zl) * np.exp(_lanczos_loggamma(1.0 - zl)))
    return out[()] if out.ndim == 0 else out


def rgamma(z):
    """1/Gamma(z), returning exactly 0 at the poles."""
    z = complex(z)
    if abs(z.imag) < 1e-12 and z.real <= 0 and abs(z.real - round(z.real)) < 1e-12:
        return 0.0j
    return 1.0 / complex_gamma(z)


# ---------------------------------------------------------------------------
# Parabolic cylinder function D_a(z)
# ---------------------------------------------------------------------------

_R_SERIES = 3.0
_R_ASYM = 9.0
_R_MAX = 50.0
_STEP = 0.5


def _taylor_step(a, z0, y, dy, h):
    """Advance (y, y') of y'' = (z^2/4 - a - 1/2) y from z0 to z0 + h."""
    p0 = z0 * z0 / 4.0 - a - 0.5
    p1 = z0 / 2.0
    c = [y, dy]
    val = y + dy * h
    der = dy
    hn = 1.0  # h**(k-2) for the next coefficient index k
    small = 0
    n = 0
    while n < 400:
        cm1 = c[n - 1] if n >= 1 else 0.0
        cm2 = c[n - 2] if n >= 2 else 0.0
        cn2 = (p0 * c[n] + p1 * cm1 + 0.25 * cm2) / ((n + 2) * (n + 1))
        c.append(cn2)
        k = n + 2
        hn_der = hn * h  # h**(k-1)
        term_d = k * cn2 * hn_der
        term = cn2 * hn_der * h
        val += term
        der += term_d
        hn = hn_der
        scale = abs(val) + abs(der) + 1e-300
        if abs(term) + abs(term_d) < 1e-17 * scale:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        n += 1
    return val, der


def _asym_series(a, z, sign):
    # sum_n  prod_{j<2n} (a - j) / (n! 2^n z^{2n}) with alternating sign (sign=-1)
    # or prod_{j<2n} (a + 1 + j) ... (sign=+1, used for the connection term)
    total = 1.0 + 0j
    term = 1.0 + 0j
    z2 = z * z
    prev = abs(term)
    for n in range(200):
        if sign < 0:
            term = term * (-(a - 2 * n) * (a - 2 * n - 1) / (2.0 * (n + 1) * z2))
        else:
            term = term * ((a + 2 * n + 1) * (a + 2 * n + 2) / (2.0 * (n + 1) * z2))
        at = abs(term)
        if at > prev and n > 2:
            break
        total += term
        prev = at
        if at < 1e-17 * abs(total):
            break
    return total


def _weber_asym(a, z):
    th = cmath.phase(z)
    main = z ** a * cmath.exp(-z * z / 4.0) * _asym_series(a, z, -1)
    if abs(th) <= math.pi / 2:  # subdominant term switches on past the Stokes line
        return main
    eps = 1 if th > 0 else -1
    conn = (math.sqrt(2 * math.pi) * rgamma(-a) * cmath.exp(eps * 1j * math.pi * a)
            * z ** (-a - 1) * cmath.exp(z * z / 4.0) * _asym_series(a, z, +1))
    return main - conn


def _weber_asym_pair(a, z):
    d = _weber_asym(a, z)
    d1 = _weber_asym(a + 1, z)
    return d, z / 2.0 * d - d1


def _march(a, z_start, y, dy, z_end):
    seg = z_end - z_start
    n = max(1, int(math.ceil(abs(seg) / _STEP)))
    h = seg / n
    z = z_start
    for _ in range(n):
        y, dy = _taylor_step(a, z, y, dy, h)
        z = z + h
    return y, dy


def _weber_origin(a):
    sqpi = math.sqrt(math.pi)
    y0 = 2.0 ** (a / 2.0) * sqpi * rgamma((1.0 - a) / 2.0)
    dy0 = -(2.0 ** ((a + 1.0) / 2.0)) * sqpi * rgamma(-a / 2.0)
    return y0, dy0


def _weber_pair(a, z):
    r = abs(z)
    if r == 0.0:
        return _weber_origin(a)
    th = cmath.phase(z)
    if abs(th) <= math.pi / 4 + 1e-14:
        # recessive direction: start from the asymptotic zone and march inward
        if r >= _R_ASYM:
            return _weber_asym_pair(a, z)
        if r <= _R_SERIES:
            y0, dy0 = _weber_origin(a)
            return _march(a, 0j, y0, dy0, z)
        zs = _R_ASYM * cmath.exp(1j * th)
        y, dy = _weber_asym_pair(a, zs)
        return _march(a, zs, y, dy, z)
    if abs(th) <= 3 * math.pi / 4 + 1e-14:
        # dominant direction: march outward from the origin
        if r >= _R_ASYM:
            return _weber_asym_pair(a, z)
        y0, dy0 = _weber_origin(a)
        return _march(a, 0j, y0, dy0, z)
    # |arg z| > 3 pi / 4: connection formula through -z and +-iz
    eps = 1 if th > 0 else -1
    d_m, dd_m = _weber_pair(a, -z)
    d_r, dd_r = _weber_pair(-a - 1, eps * 1j * z)
    c1 = cmath.exp(-eps * 1j * math.pi * a)
    c2 = math.sqrt(2 * math.pi) * rgamma(-a) * cmath.exp(-eps * 1j * math.pi * (a + 1) / 2)
    val = c1 * d_m + c2 * d_r
    der = -c1 * dd_m + c2 * eps * 1j * dd_r
    return val, der


def weber_D(a, z):
    """Parabolic cylinder function D_a(z) for complex order and argument, |z| <= 50."""
    a = complex(a)
    z = complex(z)
    if abs(z) > _R_MAX:
        raise OutOfValidatedRange(f"|z| = {abs(z):.3g} exceeds {_R_MAX}")
    return _weber_pair(a, z)[0]


def weber_D_prime(a, z):
    """Derivative d/dz D_a(z)."""
    a = complex(a)
    z = complex(z)
    if abs(z) > _R_MAX:
        raise OutOfValidatedRange(f"|z| = {abs(z):.3g} exceeds {_R_MAX}")
    return _weber_pair(a, z)[1]


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

# Gauss-Kronrod 7-15 nodes on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def adaptive_quad(f, a, b, tol=1e-10, max_eval=200_000):
    """Adaptive composite Gauss-Kronrod (7/15) integral of a vectorised f on [a, b].

    Returns (value, error_estimate).  Intervals are accepted once their local
    error falls below a share of ``tol`` proportional to their width.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0j, 0.0
    length = b - a
    lo = np.array([a])
    hi = np.array([b])
    total = 0j
    err_total = 0.0
    n_eval = 0
    while lo.size:
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        x = mid[:, None] + half[:, None] * _NODES[None, :]
        fx = np.asarray(f(x.ravel()), dtype=complex).reshape(x.shape)
        n_eval += fx.size
        k = (fx @ _WK) * half
        g = (fx @ _WG15) * half
        err = np.abs(k - g)
        allowed = tol * np.abs(hi - lo) / abs(length)
        ok = (err <= allowed) | (np.abs(half) < 1e-15 * max(1.0, abs(mid).max()))
        total += k[ok].sum()
        err_total += err[ok].sum()
        if n_eval >= max_eval and not ok.all():
            # accept what remains; report through the error estimate
            total += k[~ok].sum()
            err_total += err[~ok].sum()
            if err_total > 1e3 * tol:
                raise QuadratureError(
                    f"no convergence after {n_eval} evaluations (error ~ {err_total:.2e})")
            break
        lo, hi = lo[~ok], hi[~ok]
        mid = mid[~ok]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    return total, err_total


@dataclass(frozen=True)
class ContourSegment:
    """Oriented piece of the real line, always traversed left to right."""
    kind: str  # "finite", "ray+" (to +inf) or "ray-" (from -inf)
    a: float
    b: float

    def contains(self, s, strict=True):
        if strict:
            return self.a < s < self.b
        return self.a <= s <= self.b


def finite(a, b):
    return ContourSegment("finite", float(a), float(b))


def ray_to_plus_inf(a):
    return ContourSegment("ray+", float(a), math.inf)


def ray_from_minus_inf(b):
    return ContourSegment("ray-", -math.inf, float(b))


S_MAX = 1e3


def _tail_series(k, S, p):
    # int_S^inf (S/s)^p / (s - k) ds  =  sum_n k^n / ((p + n) S^n)   (|k| < S)
    k = complex(k)
    total = 0j
    term = 1.0 + 0j
    for n in range(200):
        c = term / (p + n)
        total += c
        if abs(c) < 1e-17 * abs(total):
            break
        term = term * k / S
    return total


def _check_decay(f, s_far, s_near, tol):
    f_far = complex(np.asarray(f(np.array([s_far])))[0])
    f_near = complex(np.asarray(f(np.array([s_near])))[0])
    if abs(f_far) > tol and abs(f_far) > 0.5 * abs(f_near):
        raise NonDecayingTail(f"integrand does not decay: |f({s_far:g})| = {abs(f_far):.3g}")
    return f_far


def _regular_piece(f, pole, seg, tol, max_eval, s_max, decay):
    """int_seg f(s)/(s - pole) ds for a pole off the (closed) segment."""
    g = lambda s: f(s) / (s - pole)
    if seg.kind == "finite":
        return adaptive_quad(g, seg.a, seg.b, tol, max_eval)[0]
    if seg.kind == "ray+":
        end = max(s_max, seg.a + s_max)
        body = adaptive_quad(g, seg.a, end, tol, max_eval)[0]
        f_end = _check_decay(f, end, end / 2, tol)
        return body + f_end * _tail_series(pole, end, decay)
    start = min(-s_max, seg.b - s_max)
    body = adaptive_quad(g, start, seg.b, tol, max_eval)[0]
    f_end = _check_decay(f, start, start / 2, tol)
    # int_{-inf}^{start} f(s)/(s - pole): substitute s -> -s
    return body - f_end * _tail_series(-pole, -start, decay)


def principal_value_integral(f, pole, domain, tol=1e-10, max_eval=200_000,
                             s_max=S_MAX, decay=2.0):
    """Principal value of int f(s)/(s - pole) ds over a union of segments.

    ``f`` is a vectorised callable.  Around the pole, a symmetric window is
    treated by singularity subtraction, which reduces it to the regular
    integral of (f(pole + u) - f(pole - u))/u over (0, d); the log term of
    the subtraction vanishes for a symmetric window.  Ray tails beyond
    ``s_max`` are added analytically assuming f ~ s**(-decay).
    """
    pole = float(pole)
    hosts = [seg for seg in domain if seg.contains(pole)]
    if not hosts:
        raise PoleOutsideDomain(f"pole {pole} is not interior to the contour")
    host = hosts[0]
    total = 0j
    for seg in domain:
        if seg is not host:
            total += _regular_piece(f, pole, seg, tol, max_eval, s_max, decay)
    d = min(pole - host.a, host.b - pole)
    if not math.isfinite(d):
        d = max(1.0, abs(pole))
    sym = lambda u: (f(pole + u) - f(pole - u)) / u
    total += adaptive_quad(sym, 0.0, d, tol, max_eval)[0]
    left_end, right_end = pole - d, pole + d
    if left_end > host.a:
        piece = (ContourSegment("finite", host.a, left_end) if host.kind != "ray-"
                 else ContourSegment("ray-", -math.inf, left_end))
        total += _regular_piece(f, pole, piece, tol, max_eval, s_max, decay)
    if right_end < host.b:
        piece = (ContourSegment("finite", right_end, host.b) if host.kind != "ray+"
                 else ContourSegment("ray+", right_end, math.inf))
        total += _regular_piece(f, pole, piece, tol, max_eval, s_max, decay)
    return total


def cauchy_contour_integral(g, k, domain, side=None, tol=1e-10, max_eval=200_000,
                            s_max=S_MAX, decay=2.0):
    """Cauchy transform (1/(2 pi i)) int g(s)/(s - k) ds over the segments.

    For real ``k`` interior to the contour a boundary value is returned:
    side=+1 (from above) or side=-1 (from below), using the Plemelj formula
    C_pm = (1/(2 pi i)) p.v. int g/(s-k) ds +- g(k)/2.
    """
    k = complex(k)
    on_contour = k.imag == 0.0 and any(seg.contains(k.real, strict=False) for seg in domain)
    if on_contour:
        if side not in (1, -1):
            raise EvaluationOnContourWithoutSideFlag(f"k = {k.real} lies on the contour")
        pv = principal_value_integral(g, k.real, domain, tol, max_eval, s_max, decay)
        gk = complex(np.asarray(g(np.array([k.real])))[0])
        return pv / (2j * math.pi) + side * gk / 2.0
    total = 0j
    for seg in domain:
        if seg.kind == "finite":
            # split at the nearest real point to concentrate nodes there
            total += _near_piece(g, k, seg.a, seg.b, tol, max_eval)
        else:
            total += _regular_piece(g, k, seg, tol, max_eval, s_max, decay)
    return total / (2j * math.pi)


def _near_piece(g, k, a, b, tol, max_eval):
    f = lambda s: g(s) / (s - k)
    c = min(max(k.real, a), b)
    if a < c < b and abs(k.imag) < 0.1 * (b - a):
        return adaptive_quad(f, a, c, tol, max_eval)[0] + adaptive_quad(f, c, b, tol, max_eval)[0]
    return adaptive_quad(f, a, b, tol, max_eval)[0]


# ---------------------------------------------------------------------------
# Piecewise Gauss-Legendre grids with barycentric interpolation
# ---------------------------------------------------------------------------

class PanelGrid:
    """Composite Gauss-Legendre nodes on a list of panels.

    Supports integration of sampled data and spectrally accurate
    interpolation inside each panel.
    """

    def __init__(self, edges, order=16):
        self.edges = np.asarray(edges, dtype=float)
        self.order = order
        x, w = np.polynomial.legendre.leggauss(order)
        lo, hi = self.edges[:-1], self.edges[1:]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        self.nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        self.weights = (half[:, None] * w[None, :]).ravel()
        # barycentric weights for Legendre points (up to a common factor)
        self._ref = x
        bw = np.array([1.0 / np.prod(x[j] - np.delete(x, j)) for j in range(order)])
        self._bw = bw / np.abs(bw).max()

    @property
    def n_panels(self):
        return len(self.edges) - 1

    def panel_of(self, s):
        idx = np.searchsorted(self.edges, s, side="right") - 1
        return np.clip(idx, 0, self.n_panels - 1)

    def interpolate(self, values, s):
        """Evaluate the panel-wise interpolant of ``values`` (shape (..., N)) at s."""
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        idx = self.panel_of(flat)
        lo, hi = self.edges[idx], self.edges[idx + 1]
        t = (2 * flat - lo - hi) / (hi - lo)
        vals = np.asarray(values).reshape(-1, self.n_panels, self.order)
        local = vals[:, idx, :]  # (m, len(flat), order)
        diff = t[:, None] - self._ref[None, :]
        exact = diff == 0.0
        diff[exact] = 1.0
        q = self._bw[None, :] / diff
        num = np.einsum("pj,mpj->mp", q, local)
        den = q.sum(axis=1)
        out = num / den[None, :]
        hit_rows, hit_cols = np.nonzero(exact)
        if hit_rows.size:
            out[:, hit_rows] = local[:, hit_rows, hit_cols]
        shape = np.asarray(values).shape[:-1] + s.shape
        return out.reshape(shape)
