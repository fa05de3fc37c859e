"""xpulse command line.

Every subcommand resolves its flags into a flat parameter dict, runs from
that dict alone and writes ``manifest.txt`` next to its outputs, so
``xpulse rerun <manifest>`` reproduces the outputs byte for byte.  Output
directory and worker count are deliberately left out of the manifest.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .csvio import (
    _parse_value,
    digest,
    fmt,
    params_text,
    read_manifest,
    write_manifest,
    write_slice,
    write_table,
)
from .energy import (
    CoverageError,
    TailDivergenceError,
    em_energy_numeric,
    scalar_energy_numeric,
)
from .fdtd import (
    BUMP,
    ConfigError,
    InstabilityError,
    NoSignalError,
    SimConfig,
    apparent_speed,
    cauchy_cone_check,
    front_arrival,
    peak_arrival,
    run_faa,
)
from .fields import sample_em_slice
from .frames import (
    boost_consistency_check,
    boosted_boundary_check,
    boosted_energy_in_cylinder,
    boosted_scalar_field,
    z_independence_check,
)
from .numerics import ConvergenceError, DomainError
from .pulse import (
    AXES,
    AxiconGeometry,
    Axis,
    FieldSlice,
    NoPeakError,
    SlicePlan,
    measured_support_length,
    peak_velocity,
    sample_slice,
)
from .spectrum import parse_spectrum
from .verify import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
MANIFEST = "manifest.txt"

NUMERIC_ERRORS = (
    ConvergenceError,
    TailDivergenceError,
    InstabilityError,
    NoSignalError,
    NoPeakError,
    DomainError,
    FloatingPointError,
)


class UsageError(ValueError):
    pass


# -- shared flags -------------------------------------------------------------------


def _geometry_flags(p: argparse.ArgumentParser, T=1.0):
    ang = p.add_mutually_exclusive_group()
    ang.add_argument("--eta", type=float, help="axicon angle in radians (default pi/4)")
    ang.add_argument("--eta-deg", type=float, help="axicon angle in degrees")
    p.add_argument("--T", type=float, default=T, help="half-width of the launch window")
    p.add_argument("--spectrum", default="rect:1", help="rect:<k0> | gauss:<c>,<w>,<lo>,<hi> | table:<path>")


def _geometry_params(args) -> dict:
    eta = math.radians(args.eta_deg) if args.eta_deg is not None else args.eta
    eta = math.pi / 4 if eta is None else eta
    try:
        S = parse_spectrum(args.spectrum)
        AxiconGeometry(eta, args.T)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return {"eta": float(eta), "T": float(args.T), "spectrum": S.label}


def _geometry(params):
    return AxiconGeometry(params["eta"], params["T"]), parse_spectrum(params["spectrum"])


def _axis_spec(text: str):
    try:
        lo, step, count = text.split(":")
        return float(lo), float(step), int(count)
    except ValueError as exc:
        raise UsageError(f"range must be min:step:count, got {text!r}") from exc


def _default_axis(name, g, S):
    if name == "t":
        return 0.0, g.T / 10, 21
    if name == "z":
        return 0.0, g.T / (10 * g.cos_eta), 21
    return 0.0, 0.25 / (S.k_max * g.sin_eta), 21


# -- field ----------------------------------------------------------------------------


def _add_field(sub):
    p = sub.add_parser("field", help="sample the scalar or EM pulse on a 2-D slice")
    _geometry_flags(p)
    p.add_argument("--plane", default="z,t", help="two of t,rho,z (axis1,axis2)")
    for a in AXES:
        p.add_argument(f"--{a}", type=float, help=f"fixed {a} (only for the axis not in the plane)")
    p.add_argument("--range1", help="axis1 grid as min:step:count")
    p.add_argument("--range2", help="axis2 grid as min:step:count")
    p.add_argument("--em", action="store_true", help="EM components instead of the scalar field")
    return p


def _resolve_field(args) -> dict:
    params = _geometry_params(args)
    names = [n.strip() for n in args.plane.split(",")]
    if len(names) != 2 or names[0] == names[1] or any(n not in AXES for n in names):
        raise UsageError(f"--plane needs two distinct names from {AXES}")
    fixed = next(a for a in AXES if a not in names)
    for a in names:
        if getattr(args, a) is not None:
            raise UsageError(f"--{a} conflicts with --plane {args.plane}")
    g, S = _geometry(params)
    params.update(plane=",".join(names), fixed=float(getattr(args, fixed) or 0.0), em=bool(args.em))
    for k, (name, text) in enumerate(zip(names, (args.range1, args.range2)), 1):
        lo, step, count = _axis_spec(text) if text else _default_axis(name, g, S)
        if not step > 0 or count < 1:
            raise UsageError("grid needs step > 0 and count >= 1")
        params.update({f"axis{k}_min": lo, f"axis{k}_step": step, f"axis{k}_count": count})
    return params


def _run_field(params, out: Path, threads: int):
    g, S = _geometry(params)
    n1, n2 = params["plane"].split(",")
    plan = SlicePlan(
        Axis(n1, params["axis1_min"], params["axis1_step"], params["axis1_count"]),
        Axis(n2, params["axis2_min"], params["axis2_step"], params["axis2_count"]),
        params["fixed"],
    )
    sl = sample_em_slice(g, S, plan, threads=threads) if params["em"] else sample_slice(g, S, plan, threads=threads)
    name = "em_slice.csv" if params["em"] else "field_slice.csv"
    path = write_slice(sl, out / name)
    print(f"wrote {name}: {plan.axis1.count}x{plan.axis2.count} samples, max |value| {fmt(float(np.abs(sl.values).max()))}")
    return [path], EXIT_OK


# -- energy ---------------------------------------------------------------------------


ENERGY_COLUMNS = ("kind", "analytic", "numeric", "relative_gap", "error_estimate", "rho_max", "kinetic", "gradient")


def _add_energy(sub):
    p = sub.add_parser("energy", help="closed-form vs volume-quadrature energy")
    _geometry_flags(p)
    p.add_argument("--kind", choices=("scalar", "em", "both"), default="both")
    p.add_argument("--rho-max", type=float, help="radial cutoff (default 200 / (k0 sin eta))")
    p.add_argument("--max-gap", type=float, default=0.02, help="fail when the relative gap exceeds this")
    return p


def _resolve_energy(args):
    params = _geometry_params(args)
    if args.rho_max is not None and args.rho_max <= 0:
        raise UsageError("--rho-max must be positive")
    params.update(kind=args.kind, rho_max=args.rho_max, max_gap=float(args.max_gap))
    return params


def _run_energy(params, out: Path, threads: int):
    g, S = _geometry(params)
    kinds = ("scalar", "em") if params["kind"] == "both" else (params["kind"],)
    reports = []
    for kind in kinds:
        fn = scalar_energy_numeric if kind == "scalar" else em_energy_numeric
        reports.append(fn(g, S, rho_max=params["rho_max"]))
    path = write_table(out / "energy.csv", ENERGY_COLUMNS, [r.as_row() for r in reports])
    print(f"{'kind':<8}{'analytic':>14}{'numeric':>14}{'gap':>11}{'tail est':>11}")
    status = EXIT_OK
    for r in reports:
        print(f"{r.kind:<8}{r.analytic:>14.6f}{r.numeric:>14.6f}{r.relative_gap:>11.3e}{r.error_estimate:>11.3e}")
        if r.relative_gap > params["max_gap"]:
            status = EXIT_FAIL
    if "scalar" in kinds:
        r = reports[0]
        print(f"equipartition: kinetic {r.kinetic:.6f} gradient {r.gradient:.6f}")
    return [path], status


# -- verify ---------------------------------------------------------------------------


def _add_verify(sub):
    p = sub.add_parser("verify", help="PDE residual, boundary and support checks")
    _geometry_flags(p)
    p.add_argument("--h", type=float, default=0.02, help="coarse finite-difference step")
    return p


def _resolve_verify(args):
    params = _geometry_params(args)
    if not args.h > 0:
        raise UsageError("--h must be positive")
    params["h"] = float(args.h)
    return params


def _run_verify(params, out: Path, threads: int):
    g, S = _geometry(params)
    lines, reports = run_suite(g, S, params["h"])
    res = write_table(
        out / "residuals.csv",
        ("operator", "h", "max_abs", "rms", "collar", "order"),
        [(r.operator, r.h, r.max_abs, r.rms, r.collar, r.order) for r in reports],
    )
    suite = write_table(out / "suite.csv", ("check", "passed", "detail"), [(l.name, l.passed, l.detail) for l in lines])
    for l in lines:
        print(f"{'PASS' if l.passed else 'FAIL'}  {l.name:<28} {l.detail}")
    return [res, suite], EXIT_OK if all(l.passed for l in lines) else EXIT_FAIL


# -- boost ----------------------------------------------------------------------------


def _add_boost(sub):
    p = sub.add_parser("boost", help="co-moving frame slice and consistency checks")
    _geometry_flags(p)
    p.add_argument("--points", type=int, default=1000, help="random points for the consistency check")
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--range-t", help="t' grid as min:step:count")
    p.add_argument("--range-rho", help="rho grid as min:step:count")
    return p


def _resolve_boost(args):
    params = _geometry_params(args)
    g, S = _geometry(params)
    if args.points < 1:
        raise UsageError("--points must be positive")
    w = g.T / g.sin_eta
    t_spec = _axis_spec(args.range_t) if args.range_t else (-1.25 * w, w / 20, 51)
    r_spec = _axis_spec(args.range_rho) if args.range_rho else _default_axis("rho", g, S)
    params.update(points=args.points, seed=args.seed)
    params.update({"t_min": t_spec[0], "t_step": t_spec[1], "t_count": t_spec[2]})
    params.update({"rho_min": r_spec[0], "rho_step": r_spec[1], "rho_count": r_spec[2]})
    return params


BOOST_LIMITS = {
    "boost_consistency": 1e-9,
    "z_independence": 1e-10,
    "mixed_boundary": 1e-9,
    "window_outside": 0.0,
    "cylinder_linearity": 1e-10,
}


def _run_boost(params, out: Path, threads: int):
    g, S = _geometry(params)
    s = g.sin_eta
    w = g.T / s
    plan = SlicePlan(
        Axis("t", params["t_min"], params["t_step"], params["t_count"]),
        Axis("rho", params["rho_min"], params["rho_step"], params["rho_count"]),
        0.0,
    )
    vals = np.array([[boosted_scalar_field(g, S, tp, r) for r in plan.axis2.values()] for tp in plan.axis1.values()])
    sl = FieldSlice(plan, vals, {"eta": g.eta, "T": g.T, "spectrum": S.label, "frame": "comoving"})
    slice_path = write_slice(sl, out / "boost_slice.csv")

    rng = np.random.default_rng(params["seed"])
    n = params["points"]
    rho_hi = 10.0 / (S.k_max * s)
    pts = np.column_stack([rng.uniform(-1.5 * w, 1.5 * w, n), rng.uniform(0, rho_hi, n), rng.uniform(-20, 20, n)])
    inner = pts[np.abs(pts[:, 0]) < w][:50]

    # window edge: zero at and beyond |t'| = T / sin(eta)
    edge = [boosted_scalar_field(g, S, sgn * w * f, r) for sgn in (-1, 1) for f in (1.0, 1.001, 1.5) for r in (0.0, 1.0)]
    rhos = np.linspace(0, rho_hi, 6)
    e1 = boosted_energy_in_cylinder(g, S, rho_hi, 1.0, 0.0)
    e2 = boosted_energy_in_cylinder(g, S, rho_hi, 2.0, 0.0)
    checks = {
        "boost_consistency": boost_consistency_check(g, S, pts),
        "z_independence": z_independence_check(g, S, inner),
        "mixed_boundary": boosted_boundary_check(g, S, np.linspace(-0.9 * w, 0.9 * w, 7), rhos),
        "window_outside": float(max(abs(v) for v in edge)),
        "cylinder_linearity": abs(e2 / e1 - 2.0) / 2.0,
    }
    rows = [(k, v, BOOST_LIMITS[k], v <= BOOST_LIMITS[k]) for k, v in checks.items()]
    check_path = write_table(out / "boost_checks.csv", ("check", "value", "limit", "passed"), rows)
    for k, v, lim, ok in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {k:<20} {v:.3e} (limit {lim:.0e})")
    return [slice_path, check_path], EXIT_OK if all(r[3] for r in rows) else EXIT_FAIL


# -- peak -----------------------------------------------------------------------------


def _add_peak(sub):
    p = sub.add_parser("peak", help="peak velocity and support length")
    _geometry_flags(p)
    p.add_argument("--times", help="comma-separated tracking times, each > T (default 2T..5T)")
    p.add_argument("--dz", type=float, default=0.01, help="z step for the support length")
    return p


def _resolve_peak(args):
    params = _geometry_params(args)
    if args.times:
        try:
            times = [float(x) for x in args.times.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad --times {args.times!r}") from exc
    else:
        times = [k * params["T"] for k in (2, 3, 4, 5)]
    if any(t <= params["T"] for t in times) or len(set(times)) < 2:
        raise UsageError("--times needs two or more distinct values above T")
    if not args.dz > 0:
        raise UsageError("--dz must be positive")
    params.update(times=";".join(fmt(t) for t in times), dz=float(args.dz))
    return params


def _run_peak(params, out: Path, threads: int):
    g, S = _geometry(params)
    times = [float(x) for x in str(params["times"]).split(";")]
    v = peak_velocity(g, S, times)
    length = measured_support_length(g, S, times[0], params["dz"])
    row = (g.eta, v, g.peak_speed, length, g.support_length, params["dz"])
    path = write_table(
        out / "peak.csv",
        ("eta", "peak_velocity", "expected_velocity", "support_length", "expected_support_length", "dz"),
        [row],
    )
    print(f"peak velocity  {v:.6f}  (1/cos eta = {g.peak_speed:.6f})")
    print(f"support length {length:.6f}  (2T/cos eta = {g.support_length:.6f}, dz = {params['dz']})")
    return [path], EXIT_OK


# -- fdtd -----------------------------------------------------------------------------


def _add_fdtd(sub):
    p = sub.add_parser("fdtd", help="finite-aperture or Cauchy-bump FDTD run")
    p.add_argument("--config", help="key=value SimConfig file (defaults when omitted)")
    p.add_argument("--front-threshold", type=float, default=1e-3, help="front threshold as a fraction of trace max")
    p.add_argument("--cone-times", default="0,1,2", help="check times for cauchy-bump configs")
    return p


def _resolve_fdtd(args):
    try:
        cfg = SimConfig.from_file(args.config) if args.config else SimConfig()
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    if not 0 < args.front_threshold < 1:
        raise UsageError("--front-threshold must lie in (0, 1)")
    try:
        cone = [float(x) for x in args.cone_times.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --cone-times {args.cone_times!r}") from exc
    if any(t < 0 or t > cfg.total_time for t in cone):
        raise UsageError("--cone-times must lie in [0, total_time]")
    params = {"front_threshold": float(args.front_threshold), "cone_times": ";".join(fmt(t) for t in cone)}
    for line in cfg.to_text().splitlines():
        key, _, value = line.partition("=")
        params[f"cfg.{key}"] = value
    return params


def _run_fdtd(params, out: Path, threads: int):
    text = "".join(f"{k[4:]}={fmt(v)}\n" for k, v in sorted(params.items()) if k.startswith("cfg."))
    cfg = SimConfig.from_text(text)
    cfg_path = out / "config.txt"
    cfg_path.write_text(cfg.to_text())
    if cfg.mode == BUMP:
        return _run_cone(cfg, params, out, cfg_path)
    traces = run_faa(cfg)
    outputs, rows = [cfg_path], []
    for k, tr in enumerate(traces):
        outputs.append(write_table(out / f"trace_{k}.csv", ("t", "value"), zip(tr.times, tr.values)))
        try:
            row = (k, front_arrival(tr, params["front_threshold"]), peak_arrival(tr), apparent_speed(tr, cfg.T))
        except NoSignalError:
            row = (k, "nan", "nan", "nan")
        rows.append(row)
        print(f"detector {k} at (rho={tr.rho}, z={tr.z}): front {row[1]}, peak {row[2]}, apparent speed {row[3]}")
    outputs.append(write_table(out / "summary.csv", ("detector", "front_arrival", "peak_arrival", "apparent_speed"), rows))
    return outputs, EXIT_OK


CONE_LIMIT = 1e-8


def _run_cone(cfg, params, out, cfg_path):
    times = [float(x) for x in str(params["cone_times"]).split(";")]
    rows = [(t, cauchy_cone_check(cfg, (t,))) for t in times]
    path = write_table(out / "cone.csv", ("t", "leakage"), rows)
    for t, leak in rows:
        print(f"{'PASS' if leak < CONE_LIMIT else 'FAIL'}  t={t}: leakage {leak:.3e} of the initial amplitude")
    return [cfg_path, path], EXIT_OK if all(leak < CONE_LIMIT for _, leak in rows) else EXIT_FAIL


# -- wiring ---------------------------------------------------------------------------

COMMANDS = {
    "field": (_add_field, _resolve_field, _run_field),
    "energy": (_add_energy, _resolve_energy, _run_energy),
    "verify": (_add_verify, _resolve_verify, _run_verify),
    "boost": (_add_boost, _resolve_boost, _run_boost),
    "peak": (_add_peak, _resolve_peak, _run_peak),
    "fdtd": (_add_fdtd, _resolve_fdtd, _run_fdtd),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xpulse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = [add(sub) for add, _, _ in COMMANDS.values()]
    rerun = sub.add_parser("rerun", help="reproduce a run from its manifest")
    rerun.add_argument("manifest")
    for p in subparsers + [rerun]:
        p.add_argument("--out", default=".", help="output directory (created if missing)")
        p.add_argument("--threads", type=int, default=1, help="worker cap; does not change outputs")
    return parser


def _normalise(params: dict) -> dict:
    """Parameter values exactly as they will read back from a manifest."""
    return {k: _load(fmt(v)) for k, v in params.items()}


def _load(text: str):
    if text == "None":
        return None
    if text in ("True", "False"):
        return text == "True"
    return _parse_value(text)


def execute(command: str, params: dict, out: Path, threads: int = 1) -> int:
    out.mkdir(parents=True, exist_ok=True)
    params = _normalise(params)
    outputs, status = COMMANDS[command][2](params, out, threads)
    write_manifest(out / MANIFEST, command, params, __version__, outputs)
    return status


def load_manifest(path) -> tuple[str, dict]:
    m = read_manifest(path)
    command = m["subcommand"]
    if command not in COMMANDS:
        raise UsageError(f"manifest names unknown subcommand {command!r}")
    params = {k: _load(v) for k, v in m["params"].items()}
    if digest(command + "\n" + params_text(params)) != m["digest"]:
        raise UsageError("manifest digest does not match its parameters")
    return command, params


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    try:
        if args.command == "rerun":
            command, params = load_manifest(args.manifest)
        else:
            command, params = args.command, COMMANDS[args.command][1](args)
        return execute(command, params, out, args.threads)
    except (UsageError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (*NUMERIC_ERRORS, CoverageError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
