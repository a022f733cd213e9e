"""Command-line surface with machine-readable output.

Every command prints one OutputRecord (JSON by default, CSV with --format
csv).  Exit codes: 0 ok, 2 parse or domain error, 3 precision exhausted,
4 verification mismatch.  Floats carry 15 significant digits; exact
rationals are printed as "p/q".
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import natural_extension as next_mod
from .cf import cf_expand, convergents, reduce_theta
from .errors import (
    AmbiguousComparison,
    HermiteLabError,
    OrbitTerminates,
    ParseError,
    PrecisionExceedsInput,
    TailUnavailable,
    VerificationMismatch,
)
from .hermite import flags_via_criterion, flags_via_envelope, hermite_subsequence
from .lattice import complete_sequence
from .numeric import parse_real, spec_text
from .stats import ExperimentConfig, run_experiment

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECISION = 3
EXIT_VERIFY = 4

_PARSE_ERRORS = (ParseError, ValueError, HermiteLabError)
_PRECISION_ERRORS = (AmbiguousComparison, PrecisionExceedsInput, TailUnavailable)


def _f15(x: float) -> float:
    return float(f"{x:.15g}")


def _num(value):
    """JSON-ready number: exact rationals as 'p/q', floats at 15 digits."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return _f15(value)
    return value


def _record(command: str, inputs: dict, results: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
    }


def _emit(record: dict, fmt: str, csv_rows: tuple[list[str], list[list]] | None):
    if fmt == "json":
        print(json.dumps(record, indent=2))
        return
    header, rows = csv_rows
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


# ---------------------------------------------------------------------------
# commands


def _cmd_expand(args) -> int:
    theta = parse_real(args.theta)
    sign, x0, nearest = reduce_theta(theta)
    pq = cf_expand(x0, args.n, strict=True)
    conv = convergents(pq)
    results = {
        "sign": sign,
        "nearest": nearest,
        "x0": spec_text(x0),
        "quotients": list(pq.quotients),
        "terminated": pq.terminated,
        "convergents": [{"index": c.index, "p": c.p, "q": c.q} for c in conv],
    }
    csv_rows = (
        ["index", "quotient", "p", "q"],
        [
            [c.index, pq.quotients[c.index - 1] if c.index >= 1 else "", c.p, c.q]
            for c in conv
        ],
    )
    _emit(_record("expand", {"theta": args.theta, "n": args.n}, results), args.format, csv_rows)
    return EXIT_OK


def _cmd_flags(args) -> int:
    theta = parse_real(args.theta)
    flags = flags_via_criterion(theta, args.n)
    seq = complete_sequence(theta, max(args.n - 1, 2))
    sub = hermite_subsequence(flags, seq)
    results = {
        "method": flags.method,
        "flags": list(flags.flags),
        "vectors": [
            {"index": v.index, "p": v.p, "q": v.q} for v in seq[: len(flags.flags)]
        ],
        "hermite_h": [e.h for e in sub.entries],
    }
    if args.verify:
        oracle = flags_via_envelope(seq)
        for k in range(min(len(flags.flags), len(oracle.flags))):
            a, b = flags.flags[k], oracle.flags[k]
            if a is not None and b is not None and a != b:
                raise VerificationMismatch(
                    f"criterion and envelope disagree at index {k}: {a} vs {b}"
                )
        results["verified"] = True
    csv_rows = (
        ["index", "flag", "p", "q"],
        [
            [k, "" if f is None else str(f).lower(), seq[k].p, seq[k].q]
            for k, f in enumerate(flags.flags)
        ],
    )
    _emit(_record("flags", {"theta": args.theta, "n": args.n, "verify": args.verify}, results), args.format, csv_rows)
    return EXIT_OK


def _parse_coordinate(text: str):
    if "/" in text or "." in text:
        return Fraction(text)
    return Fraction(int(text))


def _cmd_orbit(args) -> int:
    x = _parse_coordinate(args.x)
    y = _parse_coordinate(args.y)
    terminated_at = None
    try:
        points = next_mod.orbit(next_mod.DomainPoint(x, y), args.n)
    except OrbitTerminates as stop:
        points = stop.points
        terminated_at = stop.step
    results = {
        "points": [
            {"step": k, "x": _num(p.x), "y": _num(p.y)} for k, p in enumerate(points)
        ],
        "terminated_at": terminated_at,
    }
    csv_rows = (
        ["step", "x", "y"],
        [[k, _num(p.x), _num(p.y)] for k, p in enumerate(points)],
    )
    _emit(_record("orbit", {"x": args.x, "y": args.y, "n": args.n}, results), args.format, csv_rows)
    return EXIT_OK


def _cmd_measure(args) -> int:
    value = next_mod.mu_measure_V(args.tol)
    results = {
        "mu_V": _f15(value),
        "complement": _f15(1.0 - value),
        "abs_tol": args.tol,
    }
    csv_rows = (["mu_V", "complement", "abs_tol"], [[_f15(value), _f15(1.0 - value), args.tol]])
    _emit(_record("measure", {"tol": args.tol}, results), args.format, csv_rows)
    return EXIT_OK


_CSV_COLUMNS = [
    "theta_id",
    "n",
    "decided",
    "hermite_count",
    "proportion",
    "levy_rate",
    "hermite_growth",
    "undecided",
]


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        sample_count=args.samples,
        depth_n=args.depth,
        seed=args.seed,
        precision_bits=args.precision_bits,
        workers=args.workers,
    )
    report = run_experiment(cfg)
    payload = report.as_dict(include_reports=True)
    for summary in payload["statistics"].values():
        for key, value in summary.items():
            summary[key] = _f15(value)
    for row in payload["per_theta"]:
        for key in ("proportion", "levy_rate", "hermite_growth"):
            if row[key] is not None:
                row[key] = _f15(row[key])
    out_json = Path(args.out)
    out_csv = out_json.with_suffix(".csv")
    out_json.write_text(json.dumps(payload, indent=2) + "\n")
    with out_csv.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for row in payload["per_theta"]:
            writer.writerow([row[c] for c in _CSV_COLUMNS])
    results = dict(payload)
    del results["per_theta"]
    results["out_json"] = str(out_json)
    results["out_csv"] = str(out_csv)
    csv_rows = (
        _CSV_COLUMNS,
        [[row[c] for c in _CSV_COLUMNS] for row in payload["per_theta"]],
    )
    _emit(
        _record(
            "experiment",
            {
                "samples": args.samples,
                "depth": args.depth,
                "seed": args.seed,
                "out": str(out_json),
            },
            results,
        ),
        args.format,
        csv_rows,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermite-lab",
        description="Minimal vectors, Hermite best approximations, Gauss-map statistics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("expand", help="continued fraction of the reduced input")
    p.add_argument("--theta", required=True)
    p.add_argument("--n", type=int, required=True)
    add_format(p)
    p.set_defaults(func=_cmd_expand)

    p = sub.add_parser("flags", help="Hermite flags per minimal vector")
    p.add_argument("--theta", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--verify", action="store_true", help="cross-check with the envelope oracle")
    add_format(p)
    p.set_defaults(func=_cmd_flags)

    p = sub.add_parser("orbit", help="iterate the two-dimensional Gauss-map extension")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--n", type=int, required=True)
    add_format(p)
    p.set_defaults(func=_cmd_orbit)

    p = sub.add_parser("measure", help="quadrature of the skip-region measure")
    p.add_argument("--tol", type=float, default=1e-8)
    add_format(p)
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("experiment", help="sampled verification of the limit constants")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    add_format(p)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except _PRECISION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except _PARSE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
