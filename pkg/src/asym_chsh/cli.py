"""Command-line entry point: ``asym-chsh <command> ...``.

Exit codes: 0 pass, 1 verification failure, 2 usage error,
3 no local model at this efficiency, 4 invalid input data.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import bell, bounds, lhv, optimizer
from .entanglement import concurrence
from .errors import DomainError
from .scenario import Scenario

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NO_MODEL = 3
EXIT_BAD_DATA = 4

OUTSIDE = "outside derivation window"
INSIDE = "inside"
NO_VIOLATION = "no-violation"


class UsageError(Exception):
    pass


def fmt(v) -> str:
    return format(float(v), ".12g")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _dump(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, default=_json_default) + "\n")


def _bound_row(eta: float, relaxed: bool, use_optimizer: bool) -> list:
    if eta <= 0.5:
        return [eta, 0.0, 0.0, NO_VIOLATION, 0.0, 0.0]
    flag = INSIDE if bounds.in_derivation_window(eta) else OUTSIDE
    ub = bounds.violation_ub(eta, relaxed=relaxed)
    top = bell.top_eigenstate(bell.bell_asymmetric(bell.symmetric_construction(eta - 0.5)))
    construction = concurrence(top) ** 2
    if use_optimizer:
        c_min, _ = optimizer.min_concurrence_violating(eta)
        c_max, _ = optimizer.max_concurrence_violating(eta)
        lo, hi = c_min ** 2, c_max ** 2
    else:
        lo = hi = float("nan")
    return [eta, ub, lo, flag, hi, construction]


def cmd_bound_scan(args, out) -> int:
    start, stop, steps = args.eta_start, args.eta_stop, args.steps
    upper = 1.0 if args.relaxed_window else bounds.window_upper(0.0)
    if steps < 2:
        raise UsageError("--steps must be at least 2")
    if not start < stop:
        raise UsageError(f"--eta-start ({start}) must be below --eta-stop ({stop})")
    if start < 0.5 or stop > upper + 1e-15:
        hint = "" if args.relaxed_window else " (use --relaxed-window to extend to 1)"
        raise UsageError(f"eta range must lie within [0.5, {upper:.12g}]{hint}")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["eta", "violation_ub", "min_violating_C2", "window_flag",
                     "max_violating_C2", "construction_C2"])
    for eta in np.linspace(start, stop, steps):
        row = _bound_row(float(eta), args.relaxed_window, not args.no_optimizer)
        writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return EXIT_PASS


def _load_scenario(text: str) -> Scenario:
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    return Scenario.from_json(text)


def cmd_lambda_max(args, out) -> int:
    try:
        s = _load_scenario(args.scenario)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    kind = bell.Kind.parse(args.kind)
    op = bell.bell_operator(s, kind)
    numeric = op.lambda_max
    table = bell.coefficient_table(s, kind)
    closed = math.sqrt(bell.lambda_max_sq_general(table))
    report = {
        "kind": kind.value,
        "scenario": s.to_dict(),
        "coefficients": table.as_dict(),
        "lambda_max_numeric": numeric,
        "lambda_max_closed_form": closed,
        "discrepancy": abs(numeric - closed),
        "violates": numeric > bell.LOCAL_BOUND + 1e-12,
    }
    if kind is bell.Kind.SINGLE_SETTING:
        trig = math.sqrt(bell.lambda_max_sq_single_setting_trig(s))
        report["lambda_max_trig_form"] = trig
        report["trig_discrepancy"] = abs(trig - closed)
    _dump(report, out)
    return EXIT_PASS


def cmd_lhv_check(args, out) -> int:
    try:
        with open(args.dist) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read distribution: {exc}", file=sys.stderr)
        return EXIT_BAD_DATA
    try:
        p = lhv.NoSignalingDistribution.from_json(text, exact=args.rational)
    except lhv.SignalingError as exc:
        print(f"error: signaling distribution: {exc} (witness {exc.witness})", file=sys.stderr)
        return EXIT_BAD_DATA
    except DomainError as exc:
        print(f"error: invalid distribution: {exc}", file=sys.stderr)
        return EXIT_BAD_DATA
    try:
        eta = args.eta if args.rational else float(args.eta)
        model = lhv.massar_pironio_model(p, eta)
    except lhv.NoModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_MODEL
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --eta {args.eta!r}: {exc}") from None
    q = lhv.simulate(model)
    report = lhv.verify_simulation(p, eta, q)
    result = {
        "passed": report.passed,
        "max_deviation": report.max_deviation,
        "worst_index": list(report.index),
        "eta": str(eta),
        "hidden_values": [list(h) for h in model.hidden_values],
        "mode": "rational" if args.rational else "float",
    }
    if args.samples:
        rng = np.random.default_rng(args.seed)
        q_float = np.asarray(q, dtype=float)
        dev = 0.0
        for x in range(q_float.shape[0]):
            for y in range(q_float.shape[1]):
                est = lhv.sample(model, x, y, args.samples, rng)
                dev = max(dev, float(np.max(np.abs(est - q_float[x, y]))))
        result["sampled_max_deviation"] = dev
        result["samples"] = args.samples
    _dump(result, out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_prop1_scan(args, out) -> int:
    if args.eta < 0 or args.eta > 1:
        raise UsageError("--eta must lie in [0, 1]")
    if args.grid < 1:
        raise UsageError("--grid must be positive")
    scan = optimizer.prop1_margin_scan(args.eta, args.grid)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["theta_a", "theta_b", "margin"])
    for i, ta in enumerate(scan.theta):
        for j, tb in enumerate(scan.theta):
            writer.writerow([fmt(ta), fmt(tb), fmt(scan.margins[i, j])])
    ta, tb = scan.argmin
    m = scan.min_margin
    if args.eta == 0:
        status = "equality case"
        ok = abs(m) <= 1e-10
    else:
        status = "all positive" if m > 0 else "NON-POSITIVE MARGIN"
        ok = m > 0
    out.write(f"# min_margin={fmt(m)} at theta_a={fmt(ta)} theta_b={fmt(tb)} ({status})\n")
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_optimize(args, out) -> int:
    try:
        result = optimizer.max_value_fixed_concurrence(args.eta, args.concurrence, args.kind)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    _dump(result.to_dict(), out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asym-chsh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound-scan", help="entanglement bound and achievable curves versus eta (CSV)")
    p.add_argument("--eta-start", type=float, required=True)
    p.add_argument("--eta-stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--relaxed-window", action="store_true",
                   help="allow eta up to 1, outside the range the bound was derived for")
    p.add_argument("--no-optimizer", action="store_true",
                   help="skip the numerical search columns (written as nan)")
    p.set_defaults(func=cmd_bound_scan)

    p = sub.add_parser("lambda-max", help="largest Bell-operator eigenvalue, numeric vs closed form (JSON)")
    p.add_argument("--scenario", required=True, help='JSON object {"theta_a":..,"theta_b":..,"eta":..} or a path')
    p.add_argument("--kind", choices=["chsh", "asym", "single"], default="asym")
    p.set_defaults(func=cmd_lambda_max)

    p = sub.add_parser("lhv-check", help="simulate a no-signaling table with a local model")
    p.add_argument("--dist", required=True, help="distribution JSON file")
    p.add_argument("--eta", required=True, help="Bob's efficiency; fractions like 1/2 allowed with --rational")
    p.add_argument("--rational", action="store_true", help="exact rational arithmetic")
    p.add_argument("--samples", type=int, default=0, help="also estimate the table from seeded samples")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lhv_check)

    p = sub.add_parser("prop1-scan", help="spectral margin of the single-setting operator over an angle grid (CSV)")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--grid", type=int, default=40)
    p.set_defaults(func=cmd_prop1_scan)

    p = sub.add_parser("optimize", help="best CHSH value at fixed concurrence (JSON)")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--concurrence", type=float, required=True)
    p.add_argument("--kind", choices=["chsh", "asym", "single"], default="asym")
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
