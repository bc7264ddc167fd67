"""Exact one-soliton family on the step background, and its reflectionless spectral data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import ClosedFormSpectrum, SpectralData

EXP_GUARD = 700.0


class OnSingularLine(ValueError):
    pass


@dataclass(frozen=True)
class SolitonParams:
    A: float
    gamma0: int = -1

    def __post_init__(self):
        if self.A <= 0:
            raise ValueError("A must be positive")
        if self.gamma0 not in (1, -1):
            raise ValueError("gamma0 must be +1 or -1")

    @property
    def singular(self):
        # the denominator vanishes on t = x / A^2 only when gamma0 = +1
        return self.gamma0 == 1


def one_soliton(params, x, t):
    """u = A / (1 - gamma0 exp(-A x + A^3 t)), vectorised over x and t."""
    A, g = params.A, params.gamma0
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    e = -A * x + A ** 3 * t
    if g == 1 and np.any(np.abs(e) <= 1e-8):
        raise OnSingularLine("evaluation on the singular line t = x / A^2")
    out = np.empty_like(e)
    hi = e > EXP_GUARD
    lo = e < -EXP_GUARD
    mid = ~(hi | lo)
    out[hi] = 0.0
    out[lo] = A
    out[mid] = A / (1.0 - g * np.exp(e[mid]))
    return out[()] if out.ndim == 0 else out


def soliton_spectral_fixture(A, gamma0=-1):
    """Reflectionless Case II data: a1 = (k - iA/2)/k, a2 = k/(k - iA/2), b = 0."""
    half = 0.5j * A

    def reg(k):
        k = k.astype(complex)
        return k * (k - half), k / (k - half), np.zeros_like(k)

    spectrum = ClosedFormSpectrum(reg, 1, "reflectionless")
    kappa = A / 2
    return SpectralData(
        spectrum=spectrum,
        A=A,
        kappa=kappa,
        gamma0=gamma0,
        # d/dk (k - iA/2)/k = iA/(2k^2); at k = i kappa this is -i/kappa
        a1_prime_at_pole=-1j / kappa,
        case="II",
        a11=A / 2j,
        a2_prime_0=2j / A,
        b_at_0=0j,
        label="reflectionless",
    )
