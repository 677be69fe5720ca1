"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 bad usage or input,
3 resource guard (size cap or double-range overflow).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

from . import asymptotics as asy
from .edge_weights import LogLift, default_theta, lift_from_logs, lift_logarithms, lift_word_from_logs, solve_periodic
from .errors import DomainError, LRTraceError, MagnitudeOverflowError, ResourceGuardError
from .presets import (
    HYPERBOLIC_B0,
    LLR_EXAMPLE_LOGS,
    LLR_EXAMPLE_N,
    LR_EXAMPLE_LOGS,
    LR_EXAMPLE_N,
    PETAL_K_HAT,
    PETAL_N,
    PETAL_U,
)
from .skein_trace import N_MAX, QdlParams, check_level, term_cloud, trace_lr

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """Accept 're,im' or a Python complex literal such as '1-2j'."""
    text = text.strip()
    try:
        if "," in text:
            re_, im = text.split(",")
            return complex(float(re_), float(im))
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def parse_ints(text: str, count: int) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected {count} comma-separated integers, got {text!r}") from exc
    if len(vals) != count:
        raise UsageError(f"expected {count} comma-separated integers, got {text!r}")
    return vals


def parse_levels(args) -> list[int]:
    """Levels from --n or --range start:stop[:step] (stop inclusive), optionally one class mod 4."""
    if getattr(args, "n", None) is not None:
        levels = [args.n]
    elif getattr(args, "range", None):
        parts = args.range.split(":")
        try:
            start, stop = int(parts[0]), int(parts[1])
            step = int(parts[2]) if len(parts) > 2 else 2
        except (ValueError, IndexError) as exc:
            raise UsageError(f"bad range {args.range!r}; use start:stop[:step]") from exc
        if step <= 0:
            raise UsageError("range step must be positive")
        levels = list(range(start, stop + 1, step))
    else:
        raise UsageError("give --n or --range")
    cls = getattr(args, "congruence", None)
    if cls is not None:
        if getattr(args, "range", None) and levels and step % 4:
            raise UsageError("with --class the range step must be a multiple of 4")
        levels = [n for n in levels if n % 4 == cls]
    if not levels:
        raise UsageError("empty range of levels")
    for n in levels:
        if n % 2 == 0 or n < 1:
            raise UsageError(f"n must be odd and positive, got {n}")
    return levels


def add_lift_options(p: argparse.ArgumentParser, extra_presets: Sequence[str] = ()) -> None:
    g = p.add_argument_group("lift")
    g.add_argument("--lift", metavar="FILE", help="JSON document written by the weights command")
    g.add_argument("--b0", default="hyperbolic", help="'hyperbolic', 're,im' or a complex literal")
    g.add_argument("--sign", default="+", choices=["+", "-"])
    g.add_argument("--theta", help="puncture weight theta_v (default: principal log of a0 b0 c0)")
    g.add_argument("--branches", default="0,0,0", help="branch integers kA,kB,kV")
    g.add_argument("--logs", help="approximate A0;B0;C0 to snap onto a periodic system")
    g.add_argument("--word", default="LR", help="word for --logs (LR or LLR)")
    g.add_argument("--preset", choices=[*extra_presets, "hyperbolic", "lr-example", "llr-example"])


def build_lift(args) -> tuple[LogLift, dict]:
    """Resolve the lift options into a LogLift and a report for the weights command."""
    if args.lift:
        with open(args.lift) as fh:
            doc = json.load(fh)
        return LogLift.from_dict(doc["lift"] if "lift" in doc else doc), {}
    preset = args.preset
    if preset == "lr-example":
        lift, mismatch = lift_from_logs(*LR_EXAMPLE_LOGS)
        return lift, {"snap_mismatch": mismatch}
    if preset == "llr-example":
        return lift_word_from_logs(*LLR_EXAMPLE_LOGS, "LLR"), {}
    if args.logs:
        parts = args.logs.split(";")
        if len(parts) != 3:
            raise UsageError("--logs needs three values A0;B0;C0")
        logs = [parse_complex(x) for x in parts]
        if args.word.upper() == "LR":
            lift, mismatch = lift_from_logs(*logs)
            return lift, {"snap_mismatch": mismatch}
        return lift_word_from_logs(*logs, args.word), {}
    b0 = HYPERBOLIC_B0 if (preset == "hyperbolic" or args.b0 == "hyperbolic") else parse_complex(args.b0)
    system = solve_periodic(b0, args.sign)
    if args.theta is not None:
        theta = parse_complex(args.theta)
    elif preset == "hyperbolic" or args.b0 == "hyperbolic":
        theta = 0j
    else:
        theta = default_theta(system.triples[0])
    lift = lift_logarithms(system, theta, parse_ints(args.branches, 3))
    return lift, {"system": system.to_dict()}


def write_output(text: str, path: str | None) -> None:
    if path and path != "-":
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def fmt(x: float) -> str:
    return format(x, ".17g")


def cmd_weights(args) -> int:
    lift, report = build_lift(args)
    doc = dict(report)
    doc["lift"] = lift.to_dict()
    doc["residuals"] = {
        "exp": lift.exp_residual(),
        "winding_sum": lift.l_hat + lift.m_hat + lift.n_hat,
    }
    if "system" in doc:
        doc["residuals"]["periodic"] = doc["system"]["residual"]
    write_output(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


def trace_rows(lift: LogLift, levels: Sequence[int], n_max: int | None) -> list[dict]:
    prediction = asy.asymptotic_prediction(lift)
    rows = []
    for n in levels:
        r = trace_lr(lift, n, n_max=n_max)
        pred_log = prediction.log_predicted(n)
        rows.append({
            "n": n,
            "congruence": n % 4,
            "modulus": r.modulus,
            "log_modulus_over_n": r.log_modulus_over_n,
            "predicted": prediction.predicted_modulus(n),
            "ratio": math.exp(r.log_modulus - pred_log),
        })
    return rows


def emit_rows(rows: list[dict], fmt_name: str, path: str | None) -> None:
    if fmt_name == "json":
        write_output(json.dumps(rows, indent=2) + "\n", path)
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(rows[0].keys()))
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in row.values()])
    write_output(buf.getvalue(), path)


def n_cap(args) -> int | None:
    return None if args.n_max == 0 else args.n_max


def cmd_trace(args) -> int:
    levels = parse_levels(args)
    lift, _ = build_lift(args)
    emit_rows(trace_rows(lift, levels, n_cap(args)), args.format, args.output)
    return EXIT_OK


def cmd_converge(args) -> int:
    levels = parse_levels(args)
    lift, _ = build_lift(args)
    rate = asy.volume_rate()
    rows = []
    for n in levels:
        r = trace_lr(lift, n, n_max=n_cap(args))
        rows.append({
            "n": n,
            "congruence": n % 4,
            "deviation": r.log_modulus_over_n - rate,
            "K_estimate": math.exp(asy.class_constant_log(r)),
        })
    if args.format == "json":
        prediction = asy.asymptotic_prediction(lift)
        summary, predicted = {}, {}
        for cls in (1, 3):
            mine = [row for row in rows if row["congruence"] == cls]
            if mine:
                summary[f"K{cls}"] = mine[-1]["K_estimate"]
            predicted[f"K{cls}"] = math.exp(prediction.log_prefactor(cls))
        doc = {"volume_rate": rate, "rows": rows, "K": summary, "K_predicted": predicted}
        write_output(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        emit_rows(rows, "csv", args.output)
    return EXIT_OK


def cmd_cloud(args) -> int:
    preset = args.preset
    if preset in ("lr-example", "llr-example") or args.lift or args.logs:
        source = "trace"
    elif preset == "petal":
        source = "sigma"
    else:
        source = args.source
    if source == "sigma":
        n = args.n if args.n is not None else PETAL_N
        U = parse_complex(args.U) if args.U else PETAL_U
        V = parse_complex(args.V) if args.V else None
        k_hat = args.k_hat if args.k_hat is not None else PETAL_K_HAT
        n = check_level(n, n_cap(args))
        cloud = term_cloud("sigma", n=n, params=QdlParams.from_U(U, n, V), k_hat=k_hat, n_max=n_cap(args))
    else:
        lift, _ = build_lift(args)
        default_n = LLR_EXAMPLE_N if lift.word == "LLR" else LR_EXAMPLE_N
        n = args.n if args.n is not None else default_n
        cloud = term_cloud("trace", n=n, lift=lift, full=args.full, n_max=n_cap(args))
    if args.output and args.output != "-":
        with open(args.output, "w", newline="") as fh:
            cloud.to_csv(fh, normalize=args.normalize, comment=args.comment)
    else:
        cloud.to_csv(sys.stdout, normalize=args.normalize, comment=args.comment)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    only = [x for item in (args.only or []) for x in item.split(",") if x]
    results = run_checks(only)
    if not results:
        raise UsageError(f"--only {only!r} selects no checks")
    for r in results:
        print(r.line(), file=sys.stderr)
    report = {"passed": all(r.passed for r in results), "checks": [r.to_dict() for r in results]}
    write_output(json.dumps(report, indent=2) + "\n", args.output)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lrtrace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", help="solve the periodic weight system and lift its logarithms")
    add_lift_options(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_weights)

    def level_options(q, congruence=False):
        q.add_argument("--n", type=int)
        q.add_argument("--range", help="start:stop[:step], stop inclusive")
        if congruence:
            q.add_argument("--class", dest="congruence", type=int, choices=[1, 3])
        q.add_argument("--n-max", type=int, default=N_MAX, help="size cap on n (0 disables)")
        q.add_argument("--format", choices=["csv", "json"], default="csv")
        q.add_argument("-o", "--output")

    p = sub.add_parser("trace", help="|Trace| and its leading-order prediction per level")
    add_lift_options(p)
    level_options(p, congruence=True)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("converge", help="(1/n) log|Trace| - vol/(4 pi) and the class constants")
    add_lift_options(p)
    level_options(p, congruence=True)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("cloud", help="export the terms of Sigma_n or of the trace sum as CSV")
    add_lift_options(p, extra_presets=("petal",))
    p.add_argument("--source", choices=["sigma", "trace"], default="sigma")
    p.add_argument("--U")
    p.add_argument("--V")
    p.add_argument("--k-hat", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--full", action="store_true", help="emit every index of a triple sum")
    p.add_argument("--normalize", action="store_true", help="divide terms by the largest modulus")
    p.add_argument("--comment", action="store_true", help="prepend a '#' metadata line")
    p.add_argument("--n-max", type=int, default=N_MAX)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_cloud)

    p = sub.add_parser("verify", help="run the numbered acceptance checks")
    p.add_argument("--only", action="append", help="check numbers, names or tags (repeatable, comma-separated)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lrtrace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceGuardError, MagnitudeOverflowError) as exc:
        print(f"lrtrace: resource guard: {exc}", file=sys.stderr)
        print("lrtrace: lower n, raise --n-max, or use the log-domain columns", file=sys.stderr)
        return EXIT_GUARD
    except (DomainError, LRTraceError, ValueError) as exc:
        print(f"lrtrace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
