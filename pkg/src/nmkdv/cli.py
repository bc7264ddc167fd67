"""nmkdv command line: scattering dumps, kappa, soliton fields, asymptotic sweeps, checks.

Settings come from an optional `--config FILE` of `key = value` lines (with `#`
comments) and from `--key value` flags; flags win.  Every effective setting is
echoed into the `#` header of each output file.

Keys:
  profile      pure-step | smooth-step | bump-step | path to a two-column x,p file
  A            background amplitude (default 1)
  sigma        +1 or -1 (default 1)
  width        smooth-step / bump-step width (default 0.5)
  height       bump height (default 0.3 A)
  center       bump centre (default 1)
  gamma0       soliton sign, +1 or -1 (default -1)
  k_min k_max  spectral window (defaults 1e-3, 50)
  order        Gauss-Legendre panel order (default 16)
  n_k          points per half-line in the scatter dump (default 200)
  quad_tol     quadrature tolerance for delta and kappa integrals (default 1e-10)
  ode_rtol     Jost ODE relative tolerance (default 1e-11)
  ode_atol     Jost ODE absolute tolerance (default 1e-13)
  fd_step      relative step for a1'(i kappa) (default 1e-3)
  eps_case     Case I / II threshold on |a2(0)| (default 1e-3)
  alpha        asymptotic error exponent parameter (default (lambda + 1)/2)
  kappa_delta  cut-off in (0, kappa) (default kappa/2)
  x t          ranges lo:hi:step, or comma lists
  xi           comma list of rays x = 12 xi t (asym)
  input        FieldGrid CSV (residual)
  output       output path (default stdout)
  format       csv | jsonl (default csv)

Exit status: 0 success, 1 invariant or numerical failure, 2 configuration error.
The environment variable NMKDV_THREADS caps the worker threads of sweeps.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import scattering as sc
from . import spectral as sp
from . import asymptotics as asy
from .soliton import SolitonParams, one_soliton, soliton_spectral_fixture
from .validation import (lattice, pde_residual, read_field_csv, residual_stats,
                         sample_field, write_field_csv)

COMMANDS = ("scatter", "kappa", "soliton", "asym", "residual", "validate")

DEFAULTS = {
    "profile": "pure-step", "A": 1.0, "sigma": 1, "width": 0.5, "height": None,
    "center": 1.0, "gamma0": -1, "k_min": 1e-3, "k_max": 50.0, "order": 16, "n_k": 200,
    "quad_tol": 1e-10, "ode_rtol": 1e-11, "ode_atol": 1e-13, "fd_step": 1e-3,
    "eps_case": 1e-3, "alpha": None, "kappa_delta": None, "x": None, "t": None,
    "xi": None, "input": None, "output": None, "format": "csv",
}

FLOATS = {"A", "width", "height", "center", "k_min", "k_max", "quad_tol", "ode_rtol",
          "ode_atol", "fd_step", "eps_case", "alpha", "kappa_delta"}
INTS = {"sigma", "gamma0", "order", "n_k"}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def read_config(path):
    out = {}
    try:
        lines = open(path).read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key] = val
    return out


def _coerce(key, val):
    if key not in DEFAULTS:
        raise ConfigError(f"unknown key {key!r}")
    if val is None or not isinstance(val, str):
        return val
    try:
        if key in FLOATS:
            return float(val)
        if key in INTS:
            return int(val)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {val!r}")
    return val


def parse_values(text):
    """'a:b:h' gives a uniform lattice, 'a,b,c' a list, 'a' one value."""
    try:
        if ":" in text:
            lo, hi, h = (float(v) for v in text.split(":"))
            if h <= 0 or hi < lo:
                raise ConfigError(f"bad range {text!r}")
            return lattice(lo, hi, h)
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise ConfigError(f"cannot parse values {text!r}")


def resolve(cfg_file, flags):
    cfg = dict(DEFAULTS)
    merged = {}
    if cfg_file:
        merged.update(read_config(cfg_file))
    merged.update({k: v for k, v in flags.items() if v is not None})
    for k, v in merged.items():
        cfg[k] = _coerce(k, v)
    if cfg["sigma"] not in (1, -1) or cfg["gamma0"] not in (1, -1):
        raise ConfigError("sigma and gamma0 must be +1 or -1")
    if cfg["format"] not in ("csv", "jsonl"):
        raise ConfigError("format must be csv or jsonl")
    if cfg["A"] <= 0 or not 0 < cfg["k_min"] < cfg["k_max"]:
        raise ConfigError("need A > 0 and 0 < k_min < k_max")
    return cfg


def metadata(command, cfg):
    keys = sorted(k for k in cfg if k != "output")
    body = " ".join(f"{k}={cfg[k]}" for k in keys)
    return f"nmkdv {__version__} command={command} {body}"


def build_profile(cfg):
    name, A, sig = cfg["profile"], cfg["A"], cfg["sigma"]
    if name == "pure-step":
        return sc.pure_step(A, sig)
    if name == "smooth-step":
        return sc.StepProfile(**{**sc.smooth_step(A, cfg["width"]).__dict__, "sigma": sig})
    if name == "bump-step":
        p = sc.bump_step(A, cfg["height"], cfg["center"], cfg["width"])
        return sc.StepProfile(**{**p.__dict__, "sigma": sig})
    if not os.path.exists(name):
        raise ConfigError(f"unknown profile {name!r}")
    try:
        data = np.loadtxt(name, delimiter=",", comments="#", ndmin=2)
    except ValueError as exc:
        raise ConfigError(f"cannot read profile file: {exc}")
    return sc.StepProfile.from_samples(A, data[:, 0], data[:, 1], sigma=sig, name=name)


def spectral_data(cfg, profile=None):
    profile = profile or build_profile(cfg)
    if profile.name == "pure-step":
        return sp.pure_step_spectral_data(profile.A, profile.sigma, cfg["eps_case"])
    return sp.build_spectral_data(profile, cfg["k_min"], cfg["k_max"], cfg["order"],
                                  cfg["eps_case"])


def n_threads():
    try:
        return max(1, int(os.environ.get("NMKDV_THREADS", "1")))
    except ValueError:
        raise ConfigError("NMKDV_THREADS must be an integer")


def apply_tolerances(cfg):
    sc.ODE_RTOL = cfg["ode_rtol"]
    sc.ODE_ATOL = cfg["ode_atol"]


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _flatten(rec):
    out = {}
    for k, v in rec.items():
        if isinstance(v, (complex, np.complexfloating)):
            out[k + "_re"] = float(v.real)
            out[k + "_im"] = float(v.imag)
        elif isinstance(v, (np.floating, np.integer)):
            out[k] = v.item()
        else:
            out[k] = v
    return out


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


def write_dataset(records, fmt, path, meta="", columns=None):
    """Write homogeneous records as CSV or JSON lines after a '#' metadata line."""
    rows = [_flatten(r) for r in records]
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    if meta:
        buf.write("# " + meta + "\n")
    if fmt == "csv":
        if columns:
            buf.write(",".join(columns) + "\n")
        for r in rows:
            buf.write(",".join(_fmt(r[c]) for c in columns) + "\n")
    else:
        for r in rows:
            buf.write(json.dumps({c: r[c] for c in columns}) + "\n")
    _emit(buf.getvalue(), path)


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

SPECTRAL_COLUMNS = ["k", "a1_re", "a1_im", "a2_re", "a2_im", "b_re", "b_im",
                    "r1_re", "r1_im", "r2_re", "r2_im"]


def cmd_scatter(cfg):
    apply_tolerances(cfg)
    profile = build_profile(cfg)
    pos = np.linspace(cfg["k_min"], cfg["k_max"], cfg["n_k"])
    k = np.concatenate([-pos[::-1], pos])
    table = sc.scattering_table(profile, k, k_min=cfg["k_min"])
    rc = sc.reflection_coefficients(table)
    recs = [{"k": float(k[i]), "a1": table.a1[i], "a2": table.a2[i], "b": table.b[i],
             "r1": rc.r1[i], "r2": rc.r2[i]} for i in range(k.size)]
    write_dataset(recs, cfg["format"], cfg["output"], metadata("scatter", cfg), SPECTRAL_COLUMNS)
    return 0


def cmd_kappa(cfg):
    apply_tolerances(cfg)
    profile = build_profile(cfg)
    root, _ = sp.find_kappa_root(profile, fd_step=cfg["fd_step"])
    if profile.name == "pure-step":
        spectrum, case = sp.pure_step_spectrum(profile.A, profile.sigma), "I"
    else:
        spectrum, _ = sp.sample_spectrum(profile, cfg["k_min"], cfg["k_max"], cfg["order"])
        case = sp.classify_case(spectrum, cfg["eps_case"])
    formula = sp.kappa_by_formula(spectrum, profile.A, case, cfg["quad_tol"]).kappa
    rel = abs(root - formula) / abs(formula)
    text = (f"# {metadata('kappa', cfg)}\n"
            f"case={case}\nkappa_root={root:.12g}\nkappa_formula={formula:.12g}\n"
            f"reldiff={rel:.3e}\n")
    _emit(text, cfg["output"])
    return 0


def cmd_soliton(cfg):
    if cfg["x"] is None or cfg["t"] is None:
        raise ConfigError("soliton needs x and t ranges")
    params = SolitonParams(cfg["A"], cfg["gamma0"])
    x, t = parse_values(cfg["x"]), parse_values(cfg["t"])
    field = sample_field(lambda X, T: one_soliton(params, X, T), x, t)
    _write_field(field, cfg)
    return 0


def _write_field(field, cfg):
    meta = metadata("soliton", cfg)
    if cfg["output"] in (None, "-"):
        buf = io.StringIO()
        buf.write("# " + meta + "\n")
        buf.write(",".join(["t\\x"] + [repr(float(v)) for v in field.x_values]) + "\n")
        for tv, row in zip(field.t_values, field.u):
            buf.write(",".join([repr(float(tv))] + [repr(float(v)) for v in row]) + "\n")
        sys.stdout.write(buf.getvalue())
    else:
        write_field_csv(field, cfg["output"], meta)


def _sweep_points(cfg):
    if cfg["t"] is None:
        raise ConfigError("asym needs a t range")
    t = parse_values(cfg["t"])
    if cfg["xi"] is not None:
        xis = parse_values(cfg["xi"])
        return [(12 * xi * tv, tv) for xi in xis for tv in t]
    if cfg["x"] is None:
        raise ConfigError("asym needs xi or x")
    x = parse_values(cfg["x"])
    return [(xv, tv) for tv in t for xv in x]


def cmd_asym(cfg):
    apply_tolerances(cfg)
    spectral = spectral_data(cfg)
    points = _sweep_points(cfg)
    # one delta cache per ray xi < 0 in R_II / R_IV
    rays = sorted({round(x / (12 * t), 12) for x, t in points
                   if t != 0 and asy.classify_sector(x, t, spectral.kappa) in ("R_II", "R_IV")})
    build = lambda xi: sp.build_delta_cache(spectral, xi, cfg["quad_tol"])
    with ThreadPoolExecutor(max_workers=n_threads()) as pool:
        caches = dict(zip(rays, pool.map(build, rays)))

    def one(pt):
        x, t = pt
        if t == 0:
            return asy.AsymptoticResult(x, t, "Boundary", math.nan, math.nan, math.nan,
                                        "none", math.nan)
        cache = caches.get(round(x / (12 * t), 12))
        return asy.evaluate(x, t, spectral, cache, cfg["alpha"], cfg["kappa_delta"])

    with ThreadPoolExecutor(max_workers=n_threads()) as pool:
        results = list(pool.map(one, points))
    recs = []
    for r in results:
        rec = r.record()
        if r.t == 0:
            rec["xi"] = math.nan
        recs.append(rec)
    cols = ["x", "t", "xi", "sector", "u_leading", "u_subleading", "u_total",
            "error_order_exponent"]
    write_dataset(recs, cfg["format"], cfg["output"], metadata("asym", cfg), cols)
    return 0


def cmd_residual(cfg):
    if not cfg["input"]:
        raise ConfigError("residual needs input")
    try:
        field = read_field_csv(cfg["input"])
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read FieldGrid: {exc}")
    stats = residual_stats(pde_residual(field, cfg["sigma"]))
    stats["hx"], stats["ht"] = field.hx, field.ht
    write_dataset([stats], cfg["format"], cfg["output"], metadata("residual", cfg))
    return 0


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def invariant_checks(cfg):
    """Yield (name, value, tolerance) for the built-in invariant suite."""
    A = cfg["A"]
    profile = build_profile(cfg)

    # scattering identities on the configured profile
    pos = np.linspace(0.05, 20, 100)
    table = sc.scattering_table(profile, np.concatenate([-pos[::-1], pos]))
    ident = sc.verify_scattering_identities(table)
    tol_id = 1e-8 if profile.name == "pure-step" else 1e-6
    for key in ("det_S", "a1a2_plus_b2", "b_symmetry"):
        yield f"scatter.{key}", ident[key], tol_id
    if profile.name == "pure-step":
        ref = sc.pure_step_S(A, table.k, profile.sigma)
        rel = np.max(np.abs(table.S - ref)) / np.max(np.abs(ref))
        yield "scatter.closed_form", float(rel), 1e-8

    # kappa by root and by formula
    spectral = spectral_data(cfg, profile)
    root, _ = sp.find_kappa_root(profile, fd_step=cfg["fd_step"])
    formula = sp.kappa_by_formula(spectral.spectrum, A, spectral.case, cfg["quad_tol"]).kappa
    yield "kappa.root_vs_formula", abs(root - formula) / formula, \
        1e-8 if profile.name == "pure-step" else 1e-5

    # nu and the delta jump for the pure step with A = 2 at xi = -1
    ps = sp.pure_step_spectral_data(2.0)
    cache = sp.build_delta_cache(ps, -1.0, cfg["quad_tol"])
    yield "delta.nu_pure_step", abs(cache.nu - math.log(2) / (2 * math.pi)), 1e-8
    worst = 0.0
    for s in np.linspace(1.1, 6.0, 5):
        for k in (s, -s):
            ratio = cache.delta(k, +1) / cache.delta(k, -1)
            F = ps.spectrum.one_plus_r1r2(np.array([k]))[0]
            worst = max(worst, abs(ratio - F))
    yield "delta.jump_ratio", worst, 1e-6
    z = 0.7 + 0.4j
    yield "delta.symmetry", abs(cache.delta(z) - np.conj(cache.delta(-np.conj(z)))), 1e-8

    # one-soliton residual
    params = SolitonParams(1.0, -1)
    x = lattice(-10, 10, 0.02)
    t = lattice(-1, 1, 0.02)
    res = residual_stats(pde_residual(sample_field(lambda X, T: one_soliton(params, X, T), x, t)))
    yield "soliton.residual", res["max_abs"], 1e-6

    # solitonic sector against the exact soliton
    fx = soliton_spectral_fixture(2.0, -1)
    worst = 0.0
    for xv, tv in ((2.0, 1.0), (5.0, 2.0), (30.0, 3.0)):
        r = asy.evaluate_RI(xv, tv, fx)
        worst = max(worst, abs(r.u_total - one_soliton(SolitonParams(2.0, -1), xv, tv)))
    yield "asym.soliton_sector", worst, 1e-12

    # parabolic-cylinder model
    for nu in (0.05, 0.11, 0.3):
        model = asy.parametrix_model(nu, 0.3 + 0.2j)
        jr = max(model.jump_residual(zeta) for zeta in (-2, -1, -0.5, 0.5, 1, 2))
        yield f"parametrix.jump_nu={nu}", jr, 1e-7
        yield f"parametrix.beta_gamma_nu={nu}", abs(model.beta * model.gamma - nu), 1e-7
        w = asy.weber_wronskian(nu, 0.8)
        yield f"parametrix.wronskian_nu={nu}", abs(w - asy.weber_wronskian_closed(nu)), 1e-7


def cmd_validate(cfg):
    apply_tolerances(cfg)
    lines = [f"# {metadata('validate', cfg)}"]
    failed = 0
    for name, value, tol in invariant_checks(cfg):
        ok = bool(value <= tol)
        failed += not ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name} value={value:.3e} tol={tol:.0e}")
    lines.append(f"summary failed={failed}")
    _emit("\n".join(lines) + "\n", cfg["output"])
    return 1 if failed else 0


HANDLERS = {"scatter": cmd_scatter, "kappa": cmd_kappa, "soliton": cmd_soliton,
            "asym": cmd_asym, "residual": cmd_residual, "validate": cmd_validate}


def build_parser():
    ap = argparse.ArgumentParser(prog="nmkdv", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="key = value settings file")
    for key in DEFAULTS:
        ap.add_argument(f"--{key}", dest=key, default=None)
    return ap


def _join_negative_values(argv):
    # "--x -10:10:0.1" would otherwise read -10:10:0.1 as an option
    flags = {f"--{k}" for k in DEFAULTS} | {"--config"}
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in flags and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and argv[i + 1] not in flags and argv[i + 1] not in ("-h", "--help"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None):
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = ap.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return 2 if exc.code else 0
    flags = {k: getattr(args, k) for k in DEFAULTS}
    try:
        cfg = resolve(args.config, flags)
        return HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"nmkdv: config error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"nmkdv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
