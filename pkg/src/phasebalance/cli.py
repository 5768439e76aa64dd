"""
Command line entry point.

    phasebalance validate --config F
    phasebalance run      --config F --out D [--decimation N]
    phasebalance curve    --config F --samples N --out D
    phasebalance bench    --config F [--calls N] [--grid N] [--json PATH]

Exit codes: 0 success, 1 I/O failure, 2 bad configuration,
3 boundary violation during a run, 4 interpolant certification failure.
"""

import argparse
import csv
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .bench import benchmark_sigma
from .config import ConfigError, load_scenario, scenario_to_dict
from .curve import curvature_at, offset_boundary, perimeter
from .interpolant import CertificationError
from .sim import TrajectoryLog, initial_errors, run, validate
from .specfun import ellint_e_incomplete

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_BOUNDARY, EXIT_CERT = 0, 1, 2, 3, 4


def _err(msg):
    print(msg, file=sys.stderr)


def _load(path):
    """Scenario or an exit code."""
    try:
        return load_scenario(path)
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    except OSError as exc:
        _err(f"cannot read {path}: {exc}")
        return EXIT_IO


def cmd_validate(args):
    sc = _load(args.config)
    if isinstance(sc, int):
        return sc
    delta = sc.gains.delta
    for k, e in enumerate(initial_errors(sc)):
        mark = "ok" if e < delta else "INFEASIBLE"
        print(f"agent {k}: |e(0)| = {e:.12g}  delta = {delta:.12g}  {mark}")
    problems = validate(sc)
    for p in problems:
        print(f"violation: {p}")
    print("valid" if not problems else f"invalid ({len(problems)} violation(s))")
    return EXIT_OK if not problems else EXIT_CONFIG


def write_trajectory(log, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TrajectoryLog.COLUMNS)
        for row in log.rows():
            w.writerow([repr(float(row[0])), row[1]] + [repr(float(v)) for v in row[2:]])


def cmd_run(args):
    sc = _load(args.config)
    if isinstance(sc, int):
        return sc
    problems = validate(sc)
    if problems:
        for p in problems:
            _err(f"violation: {p}")
        return EXIT_CONFIG
    if args.decimation is not None and args.decimation < 1:
        _err("--decimation must be >= 1")
        return EXIT_CONFIG
    try:
        log = run(sc, log_decimation=args.decimation)
    except CertificationError as exc:
        _err(f"sigma interpolant certification failed: {exc}")
        return EXIT_CERT
    out = Path(args.out)
    summary = log.summary()
    summary["scenario"] = scenario_to_dict(sc)
    summary["log_decimation"] = args.decimation or sc.log_decimation
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_trajectory(log, out / "trajectory.csv")
        (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    except OSError as exc:
        _err(f"cannot write to {out}: {exc}")
        return EXIT_IO
    if not log.ok:
        _err(f"boundary violation: {log.failure}")
        _err(f"partial trajectory ({len(log.time)} logged steps) kept in {out / 'trajectory.csv'}")
        return EXIT_BOUNDARY
    print(f"order parameter {summary['final_order_parameter']:.3e}, "
          f"max |e| {summary['final_max_e_norm']:.3e}, "
          f"mean u (last 10 s) {', '.join(f'{u:.4f}' for u in summary['mean_u_last_10s'])}, "
          f"{summary['wall_time_s']:.1f} s")
    return EXIT_OK


def curve_samples(curve, n):
    """Columns t, x, y, kappa, sigma, psi over one period, t in [0, 2 pi].

    sigma is the arc length from t = 0, so its last value is the perimeter.
    """
    t = np.linspace(0.0, 2.0 * math.pi, n)
    a, b = curve.a, curve.b
    sigma = a * t if curve.is_circle else b * ellint_e_incomplete(t, curve.m)
    kappa = np.array([curvature_at(curve, v) for v in t])
    psi = np.mod(2.0 * math.pi * sigma / perimeter(curve), 2.0 * math.pi)
    return np.column_stack([t, a * np.cos(t), b * np.sin(t), kappa, sigma, psi])


def cmd_curve(args):
    sc = _load(args.config)
    if isinstance(sc, int):
        return sc
    if args.samples < 16:
        _err("--samples must be >= 16")
        return EXIT_CONFIG
    delta = sc.gains.delta
    if not delta > 0:
        _err("gains.delta must be > 0")
        return EXIT_CONFIG
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        outer, inner = offset_boundary(sc.curve, delta, args.samples)
    for w in caught:
        _err(f"warning: {w.message}")
    cols = curve_samples(sc.curve, args.samples)
    tb = np.linspace(0.0, 2.0 * math.pi, args.samples, endpoint=False)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "curve.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "x", "y", "kappa", "sigma", "psi"])
            w.writerows([[repr(float(v)) for v in row] for row in cols])
        with open(out / "boundary.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "outer_x", "outer_y", "inner_x", "inner_y"])
            for row in zip(tb, outer[:, 0], outer[:, 1], inner[:, 0], inner[:, 1]):
                w.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        _err(f"cannot write to {out}: {exc}")
        return EXIT_IO
    print(f"wrote {args.samples} curve samples and offset boundaries at delta = {delta} to {out}")
    return EXIT_OK


def cmd_bench(args):
    sc = _load(args.config)
    if isinstance(sc, int):
        return sc
    try:
        rep = benchmark_sigma(sc.curve, calls=args.calls, grid_size=args.grid)
    except CertificationError as exc:
        _err(f"certification failed: {exc}")
        return EXIT_CERT
    except ValueError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    if rep.get("closed_form"):
        print(rep["note"])
    else:
        print(f"ellipse a={rep['a']}, b={rep['b']}, grid {rep['grid_size']}")
        print(f"  certified max |sigma error|  {rep['certified_max_abs_error']:.3e}")
        print(f"  batch ({rep['batch_calls']} calls): direct {rep['direct_batch_s']:.3f} s, "
              f"interpolated {rep['interp_batch_s']:.3f} s, speed-up {rep['batch_speedup']:.1f}x, "
              f"max |d sigma| {rep['batch_max_abs_error']:.3e}")
        print(f"  scalar: direct {rep['direct_scalar_us']:.2f} us/call, "
              f"interpolated {rep['interp_scalar_us']:.2f} us/call, speed-up {rep['scalar_speedup']:.1f}x")
    text = json.dumps(rep, indent=2)
    print(text)
    if args.json:
        try:
            Path(args.json).write_text(text + "\n")
        except OSError as exc:
            _err(f"cannot write {args.json}: {exc}")
            return EXIT_IO
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="phasebalance", description=__doc__.split("\n\n")[0].strip())
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a scenario file and initial feasibility")
    v.add_argument("--config", required=True)
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="simulate a scenario and write trajectory.csv, summary.json")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--decimation", type=int, default=None, help="log every N-th step")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("curve", help="write curve.csv and boundary.csv samples")
    c.add_argument("--config", required=True)
    c.add_argument("--samples", type=int, default=512)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_curve)

    b = sub.add_parser("bench", help="time direct versus interpolated arc length")
    b.add_argument("--config", required=True)
    b.add_argument("--calls", type=int, default=1_000_000)
    b.add_argument("--grid", type=int, default=1024)
    b.add_argument("--json", default=None, help="also write the report to this path")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
