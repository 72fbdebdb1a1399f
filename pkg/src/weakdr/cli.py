"""Command-line surface.

Four subcommands: ``guarantee`` writes the approximation-curve CSV,
``solve`` runs the full search on an instance file and writes a report,
``verify`` runs the randomized property suites, and ``estimate-gamma``
certifies an instance's weak-DR parameter.  Exit codes: 0 success,
2 usage or parse errors, 3 I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .driver import RunBudget, solve
from .errors import InstanceFormatError, ParameterError, WeakDRError
from .guarantee import emit_curve
from .instances import (
    dump_report,
    format_float,
    parse_instance,
    report_document,
)
from .objectives import estimate_gamma_report, lipschitz_lower_bound
from .verify import SUITE_NAMES, run_suite

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3


def _parse_range(spec: str) -> list[float]:
    try:
        start, stop, step = (float(p) for p in spec.split(":"))
    except ValueError as exc:
        raise ParameterError(f"range must look like start:stop:step, got {spec!r}") from exc
    if step <= 0 or stop < start:
        raise ParameterError(f"bad range {spec!r}")
    count = int(round((stop - start) / step)) + 1
    values = [round(start + i * step, 10) for i in range(count)]
    return [v for v in values if v <= stop + 1e-12]


def cmd_guarantee(args: argparse.Namespace) -> int:
    gammas: list[float] = list(args.gamma or [])
    if args.range:
        gammas.extend(_parse_range(args.range))
    if not gammas:
        print("error: provide --gamma or --range", file=sys.stderr)
        return EXIT_USAGE
    gammas = sorted(set(gammas))
    if any(not 0.0 < g <= 1.0 for g in gammas):
        print(f"error: every gamma must lie in (0,1], got {gammas}", file=sys.stderr)
        return EXIT_USAGE
    kwargs = dict(r_max=args.r_max, grid_r=args.grid_r, grid_t=args.grid_t)
    try:
        if args.out:
            with open(args.out, "w", newline="") as fh:
                emit_curve(gammas, fh, **kwargs)
        else:
            emit_curve(gammas, sys.stdout, **kwargs)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    try:
        spec = parse_instance(Path(args.instance))
    except InstanceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: cannot read instance: {exc}", file=sys.stderr)
        return EXIT_IO

    f = spec.build_objective()
    gamma = spec.resolve_gamma(f, samples=args.gamma_samples)
    f = f.with_gamma(gamma)
    if spec.smoothness is None and f.smoothness == 0.0 and spec.objective["type"] == "builtin":
        f = f.with_smoothness(lipschitz_lower_bound(f, seed=spec.seed) * 1.25)
    body = spec.build_body()
    cfg = spec.build_config(gamma)
    budget = RunBudget(max_levels=args.max_levels, max_calls=args.max_calls)
    report = solve(f, body, cfg, budget, seed=spec.seed)

    doc = report_document(
        report,
        spec,
        gamma_used=gamma,
        smoothness_used=f.smoothness,
        library_version=__version__,
        wall_time_s=None if args.no_timestamp else time.monotonic() - t0,
        created_at=None if args.no_timestamp else datetime.now(timezone.utc).isoformat(),
    )
    try:
        if args.out:
            Path(args.out).write_text(dump_report(doc))
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    print(format_float(report.best_value))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_suite(args.suite, trials=args.trials, seed=args.seed)
    ok = True
    for res in results:
        status = "pass" if res.passed else "FAIL"
        print(f"{res.suite}: {status} ({res.checks_run} checks, {res.trials} trials)")
        for failure in res.failures:
            ok = False
            print(f"  {failure.check}: {failure.detail}", file=sys.stderr)
            if failure.instance is not None:
                replay = Path(args.replay_dir) / f"replay_{res.suite}_{args.seed}.json"
                replay.parent.mkdir(parents=True, exist_ok=True)
                replay.write_text(json.dumps(
                    {"suite": res.suite, "check": failure.check, "seed": args.seed,
                     "detail": failure.detail, "instance": failure.instance},
                    indent=2, default=float) + "\n")
                print(f"  counterexample written to {replay}", file=sys.stderr)
    return EXIT_OK if ok else 1


def cmd_estimate_gamma(args: argparse.Namespace) -> int:
    try:
        spec = parse_instance(Path(args.instance))
    except InstanceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: cannot read instance: {exc}", file=sys.stderr)
        return EXIT_IO
    f = spec.build_objective()
    est = estimate_gamma_report(f, samples=args.samples, seed=spec.seed)
    print(f"gamma_hat = {est.gamma:.6f} ({est.samples} samples)")
    if est.degenerate:
        print("warning: degenerate oracle (no usable gradient pairs); defaulted to 1.0")
    elif est.worst_lower is not None:
        lo = np.array2string(est.worst_lower, precision=6)
        hi = np.array2string(est.worst_upper, precision=6)
        print(f"worst pair: x={lo} <= y={hi} at coordinate {est.worst_coordinate}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakdr",
        description="Weakly DR-submodular maximization over down-closed bodies",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("guarantee", help="emit the approximation-guarantee curve as CSV")
    g.add_argument("--gamma", type=float, action="append", help="a single gamma (repeatable)")
    g.add_argument("--range", help="gamma range start:stop:step, endpoints included")
    g.add_argument("--r-max", type=float, default=10.0)
    g.add_argument("--grid-r", type=int, default=1000)
    g.add_argument("--grid-t", type=int, default=999)
    g.add_argument("--out", "-o", help="output CSV path (default: stdout)")
    g.set_defaults(fn=cmd_guarantee)

    s = sub.add_parser("solve", help="run the recursive solver on an instance file")
    s.add_argument("instance")
    s.add_argument("--out", "-o", help="report file path")
    s.add_argument("--max-calls", type=int, default=100_000)
    s.add_argument("--max-levels", type=int, default=None)
    s.add_argument("--gamma-samples", type=int, default=1000)
    s.add_argument("--no-timestamp", action="store_true",
                   help="omit wall time and creation time (byte-stable reports)")
    s.set_defaults(fn=cmd_solve)

    v = sub.add_parser("verify", help="run randomized property suites")
    v.add_argument("suite", choices=SUITE_NAMES)
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--replay-dir", default=".")
    v.set_defaults(fn=cmd_verify)

    e = sub.add_parser("estimate-gamma", help="certify an instance's weak-DR parameter")
    e.add_argument("instance")
    e.add_argument("--samples", type=int, default=2000)
    e.set_defaults(fn=cmd_estimate_gamma)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InstanceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WeakDRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
