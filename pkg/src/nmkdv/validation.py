"""Residual and boundary checks of candidate fields u(x, t) on symmetric lattices.

The nonlinearity couples (x, t) to (-x, -t), so the lattice is required to be
symmetric about the origin; the mirror field is then just u reversed along
both axes.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class ValidationError(ValueError):
    pass


class AsymmetricGrid(ValidationError):
    pass


class GridTooSmall(ValidationError):
    pass


class GridTooNarrow(ValidationError):
    pass


@dataclass
class FieldGrid:
    x_values: np.ndarray
    t_values: np.ndarray
    u: np.ndarray  # indexed (t, x)

    def __post_init__(self):
        self.x_values = np.asarray(self.x_values, dtype=float)
        self.t_values = np.asarray(self.t_values, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.u.shape != (self.t_values.size, self.x_values.size):
            raise ValueError("u must have shape (len(t_values), len(x_values))")

    @property
    def hx(self):
        return float(np.mean(np.diff(self.x_values)))

    @property
    def ht(self):
        return float(np.mean(np.diff(self.t_values)))

    def mirror(self):
        """u(-x, -t) as a field on the same lattice."""
        return FieldGrid(self.x_values, self.t_values, self.u[::-1, ::-1])

    def check_symmetric(self, rtol=1e-9):
        for name, v in (("x", self.x_values), ("t", self.t_values)):
            scale = max(1.0, np.abs(v).max())
            if np.max(np.abs(v + v[::-1])) > rtol * scale:
                raise AsymmetricGrid(f"{name}-axis is not symmetric about 0")
            d = np.diff(v)
            if v.size > 1 and np.max(np.abs(d - d.mean())) > 1e-6 * abs(d.mean()):
                raise AsymmetricGrid(f"{name}-axis is not uniformly spaced")


def lattice(lo, hi, h):
    """Symmetric uniform lattice from lo to hi (lo = -hi expected) with step h."""
    n = int(round((hi - lo) / h))
    v = lo + h * np.arange(n + 1)
    if lo == -hi:
        v = 0.5 * (v - v[::-1])  # exact mirror pairs
    return v


def sample_field(fn, x, t):
    X, T = np.meshgrid(x, t)
    return FieldGrid(x, t, fn(X, T))


def _d1(u, h, axis):
    f = lambda s: np.take(u, range(2 + s, u.shape[axis] - 2 + s), axis=axis)
    return (f(-2) - 8 * f(-1) + 8 * f(1) - f(2)) / (12 * h)


def _d3(u, h, axis):
    f = lambda s: np.take(u, range(3 + s, u.shape[axis] - 3 + s), axis=axis)
    return (f(-3) - 8 * f(-2) + 13 * f(-1) - 13 * f(1) + 8 * f(2) - f(3)) / (8 * h ** 3)


def pde_residual(field, sigma=1):
    """u_t + 6 sigma u(x,t) u(-x,-t) u_x + u_xxx on the interior, 4th-order stencils.

    Interior excludes 3 columns on each side in x and 2 rows on each side in t.
    """
    field.check_symmetric()
    nt, nx = field.u.shape
    if nt < 7 or nx < 7:
        raise GridTooSmall("need at least 7 points per axis")
    u = field.u
    m = u[::-1, ::-1]
    hx, ht = field.hx, field.ht
    ut = _d1(u, ht, 0)[:, 3:-3]
    ux = _d1(u, hx, 1)[2:-2, 1:-1]
    uxxx = _d3(u, hx, 1)[2:-2, :]
    core = (slice(2, -2), slice(3, -3))
    res = ut + 6 * sigma * u[core] * m[core] * ux + uxxx
    return FieldGrid(field.x_values[3:-3], field.t_values[2:-2], res)


def residual_stats(res):
    r = np.abs(res.u)
    return {"max_abs": float(r.max()), "rms": float(np.sqrt(np.mean(r ** 2))),
            "n_points": int(r.size)}


def boundary_check(field, A, edge_fraction=0.1):
    x = field.x_values
    if A > 0 and min(-x[0], x[-1]) < 10.0 / A:
        raise GridTooNarrow(f"lattice must reach |x| >= {10.0 / A:g}")
    n = max(1, int(round(edge_fraction * x.size)))
    right = np.max(np.abs(field.u[:, -n:] - A), axis=1)
    left = np.max(np.abs(field.u[:, :n]), axis=1)
    return {"right_gap": right, "left_gap": left,
            "max_right_gap": float(right.max()), "max_left_gap": float(left.max())}


# ---------------------------------------------------------------------------
# FieldGrid CSV
# ---------------------------------------------------------------------------

def write_field_csv(field, path, meta=None):
    with open(path, "w", newline="") as fh:
        if meta:
            fh.write("# " + meta + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t\\x"] + [repr(float(v)) for v in field.x_values])
        for t, row in zip(field.t_values, field.u):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in row])


def read_field_csv(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    if not rows or rows[0][0] != "t\\x":
        raise ValueError("not a FieldGrid file")
    x = np.array([float(v) for v in rows[0][1:]])
    t = np.array([float(r[0]) for r in rows[1:]])
    u = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return FieldGrid(x, t, u.reshape(t.size, x.size))
