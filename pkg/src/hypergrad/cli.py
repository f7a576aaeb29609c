"""Command line entry point: ``hypergrad sweep | retraction-error | trace``.

Exit codes: 0 on success, 1 on usage errors, 2 on runtime or numerical
failures.
"""

import argparse
import csv
import math
import sys

import numpy as np

from .errors import HypergradError
from .experiment import (
    DEFAULT_ALPHAS,
    SweepConfig,
    emit_records,
    emit_retraction_error_curve,
    emit_table,
    format_table,
    run_sweep,
    run_trace,
    summary_to_json,
)
from .frechet import METHODS

EXIT_USAGE = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _alpha_list(text):
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid learning-rate list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("learning-rate list is empty")
    return values


def _sibling(path, suffix):
    stem = path[: -len(".csv")] if path.endswith(".csv") else path
    stem = stem[: -len(".json")] if stem.endswith(".json") else stem
    return stem + suffix


def _add_sampling_args(p):
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--r-max", type=float, default=3.0)
    p.add_argument("--centers", type=int, default=50)
    p.add_argument("--collections", type=int, default=50)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--cap", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = _Parser(prog="hypergrad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="run the steps-to-arrival benchmark")
    _add_sampling_args(sw)
    sw.add_argument("--alphas", type=_alpha_list, default=list(DEFAULT_ALPHAS),
                    help="comma-separated learning rates")
    sw.add_argument("--threads", type=int, default=1, help="worker processes")
    sw.add_argument("--out", default=None,
                    help="records file; the table and summary go next to it")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")

    re_ = sub.add_parser("retraction-error", help="worst-case retraction error curve")
    re_.add_argument("--step", type=float, default=1.0)
    re_.add_argument("--d-max", type=float, default=3.0)
    re_.add_argument("--d-steps", type=int, default=7, help="number of d values")
    re_.add_argument("--directions", type=int, default=360)

    tr = sub.add_parser("trace", help="iterates of one trial in disc coordinates")
    _add_sampling_args(tr)
    tr.add_argument("--center", type=int, default=0)
    tr.add_argument("--collection", type=int, default=0)
    tr.add_argument("--alpha", type=float, default=0.45)
    tr.add_argument("--method", choices=METHODS + ("both",), default="both")
    tr.add_argument("--out", default=None)
    return parser


def _config(args, **extra):
    return SweepConfig(
        dim=args.dim, r_max=args.r_max, num_centers=args.centers,
        collections_per_center=args.collections, cloud_size=args.points,
        arrival_tol=args.tol, step_cap=args.cap, master_seed=args.seed, **extra,
    )


def _cmd_sweep(args):
    config = _config(args, alphas=args.alphas, worker_count=args.threads,
                     output_path=args.out, output_format=args.format)
    print(f"master seed: {config.master_seed}", file=sys.stderr)
    records, table = run_sweep(config)
    if args.out:
        emit_records(records, config.output_format, args.out)
        emit_table(table, _sibling(args.out, ".table.json"))
        with open(_sibling(args.out, ".summary.json"), "w") as f:
            f.write(summary_to_json(config, table))
    print(format_table(table))
    for a in config.alphas:
        win, slope = table.win_rate[a], table.slope[a]
        if not math.isnan(win):
            print(f"alpha={a:g}: exponential first in {100 * win:.1f}% of pairs, slope {slope:.3f}")
    fails = table.diagnostics["reference_failures"]
    if fails:
        print(f"warning: {len(fails)} reference solves failed and were excluded",
              file=sys.stderr)
    return 0


def _cmd_retraction_error(args):
    if args.d_steps < 1 or not args.step > 0 or args.d_max < 0 or args.directions < 1:
        raise _UsageError("--d-steps, --directions and --step must be positive and --d-max >= 0")
    d_values = np.linspace(0.0, args.d_max, args.d_steps)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["d", "worst_error"])
    for d, err in emit_retraction_error_curve(d_values, args.step, args.directions):
        w.writerow([format(d, ".17g"), format(err, ".17g")])
    return 0


def _cmd_trace(args):
    config = _config(args)
    print(f"master seed: {config.master_seed}", file=sys.stderr)
    methods = METHODS if args.method == "both" else (args.method,)
    rows = run_trace(config, args.center, args.collection, args.alpha, methods)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["series", "step"] + [f"y{i + 1}" for i in range(config.dim)])
        for series, step, y in rows:
            w.writerow([series, step] + [format(v, ".17g") for v in y])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


class _UsageError(Exception):
    pass


_COMMANDS = {"sweep": _cmd_sweep, "retraction-error": _cmd_retraction_error, "trace": _cmd_trace}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (_UsageError, ValueError) as exc:
        if isinstance(exc, HypergradError):
            print(f"hypergrad: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        print(f"hypergrad: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HypergradError, OSError, ArithmeticError, AssertionError) as exc:
        print(f"hypergrad: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
