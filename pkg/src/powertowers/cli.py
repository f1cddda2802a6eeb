"""Command-line surface binding the library modules for scripted use.

Every command is deterministic given its flags and config: stdout carries
only the declared output format (text, jsonl, or csv) and all diagnostics
go to stderr.  Exit codes: 0 success, 2 configuration or argument error,
3 precision-cap flag events under `enumerate --strict`, 1 any other
runtime failure (undecidable digit, exhausted scan budget, overflow).

Config is read from the JSON file named by the POWERTOWERS_CONFIG
environment variable, when set; individual flags override it.  Row schemas
for jsonl/csv output are fixed under SCHEMA_VERSION.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .approx import (
    NAMED_TARGETS,
    TargetSpec,
    best_approx,
    density_profile,
    error_string,
)
from .approx import profile_records as approx_records
from .cantor import (
    DEFAULT_SCAN_BUDGET,
    BudgetExhausted,
    Eq15Example,
    FileStream,
    RationalsCalkinWilf,
    SequenceSource,
    TowerEnumeration,
    diagonal,
    diagonal_difference_profile,
    diagonal_records,
    nested_intervals,
    nested_records,
    profile_records,
)
from .enumeration import CheckpointError, Enumerator, entry_record
from .evaluator import (
    DEFAULT_START_DIGITS,
    DigitUndecidable,
    decimal_digits,
    digits_to_bits,
    eval_interval,
)
from .expr import parse, render
from .reference_listing import REFERENCE_LISTING
from .values import exact_rational

CONFIG_ENV = "POWERTOWERS_CONFIG"
SCHEMA_VERSION = "1"
FORMATS = ("text", "jsonl", "csv")


class ConfigError(Exception):
    """Invalid configuration file or setting."""


# --- configuration ----------------------------------------------------------


@dataclass
class Config:
    """Resolved settings; defaults apply when no config file is given.

    precision_cap: decimal digits the shared refinement loops may reach (>= 64)
    dedup_policy:  only "value" exists (commit iff the value is new)
    output_format: default stdout format for commands without --format
    checkpoint:    default enumerate checkpoint path, None for stateless runs
    """

    precision_cap: int = 4096
    dedup_policy: str = "value"
    output_format: str = "text"
    checkpoint: Optional[str] = None


def load_config(path: Optional[str]) -> Config:
    config = Config()
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}")
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in data.items():
            if key == "precision_cap":
                config.precision_cap = value
            elif key == "dedup_policy":
                config.dedup_policy = value
            elif key == "output_format":
                config.output_format = value
            elif key == "checkpoint":
                config.checkpoint = value
            else:
                raise ConfigError(f"unknown config key {key!r}")
    _validate_config(config)
    return config


def _validate_config(config: Config) -> None:
    if not isinstance(config.precision_cap, int) or isinstance(
        config.precision_cap, bool
    ):
        raise ConfigError("precision_cap must be an integer")
    if config.precision_cap < 64:
        raise ConfigError("precision_cap must be >= 64 digits")
    if config.dedup_policy != "value":
        raise ConfigError("dedup_policy must be 'value' (the only policy)")
    if config.output_format not in FORMATS:
        raise ConfigError(
            f"output_format must be one of {', '.join(FORMATS)}"
        )
    if config.checkpoint is not None and not isinstance(config.checkpoint, str):
        raise ConfigError("checkpoint must be a path string or null")


# --- output emitters --------------------------------------------------------


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


class Emitter:
    """Streams row dicts to stdout in one declared format."""

    def __init__(self, fmt: str, columns: Sequence[str], text_line: Callable[[dict], str]):
        self.fmt = fmt
        self.columns = columns
        self.text_line = text_line
        self._csv = None
        if fmt == "csv":
            self._csv = csv.writer(sys.stdout, lineterminator="\n")
            self._csv.writerow(columns)

    def row(self, record: dict) -> None:
        if self.fmt == "jsonl":
            sys.stdout.write(json.dumps(record) + "\n")
        elif self.fmt == "csv":
            self._csv.writerow([_cell(record[c]) for c in self.columns])
        else:
            sys.stdout.write(self.text_line(record) + "\n")

    def rows(self, records) -> None:
        for record in records:
            self.row(record)

    def tail(self, key: str, value: str) -> None:
        # one trailing summary datum; csv stays rows-only by schema
        if self.fmt == "jsonl":
            sys.stdout.write(json.dumps({key: value}) + "\n")
        elif self.fmt == "text":
            sys.stdout.write(f"{key}: {value}\n")


def _diag(message: str) -> None:
    sys.stderr.write(message + "\n")


# --- sequence sources -------------------------------------------------------

SOURCE_NAMES = ("towers", "rationals", "eq15", "file")


def make_source(name: str, file_path: Optional[str]) -> SequenceSource:
    if name == "towers":
        return TowerEnumeration()
    if name == "rationals":
        return RationalsCalkinWilf()
    if name == "eq15":
        return Eq15Example()
    if name == "file":
        if not file_path:
            raise ValueError("--source file requires --file PATH")
        return FileStream(file_path)
    raise ValueError(f"unknown source {name!r}")


# --- commands ---------------------------------------------------------------

_ENUM_COLUMNS = ("index", "weight", "expr", "value", "exact")


def _enum_line(r: dict) -> str:
    mark = " (rational)" if r["exact"] else ""
    return f"#{r['index']} w{r['weight']} {r['expr']} = {r['value']}{mark}"


def cmd_enumerate(args, config: Config) -> int:
    fmt = args.format or config.output_format
    checkpoint = args.checkpoint or config.checkpoint
    if args.count is not None and args.count < 0:
        raise ValueError("--count must be >= 0")
    if args.max_weight is not None and args.max_weight < 2:
        raise ValueError("--max-weight must be >= 2 (no expression is lighter)")
    if checkpoint and os.path.exists(checkpoint):
        enum = Enumerator.load_checkpoint(checkpoint)
        if enum.cap_digits != config.precision_cap:
            _diag(
                f"note: resuming with the checkpoint's precision cap "
                f"{enum.cap_digits}, not the configured {config.precision_cap}"
            )
    else:
        enum = Enumerator(cap_digits=config.precision_cap)
    emitter = Emitter(fmt, _ENUM_COLUMNS, _enum_line)
    for entry in enum.stream(max_count=args.count, max_weight=args.max_weight):
        emitter.row(entry_record(entry))
    if checkpoint:
        enum.save_checkpoint(checkpoint)
    c = enum.counters
    _diag(
        f"generated={c['generated']} committed={c['committed']} "
        f"skipped_duplicate={c['skipped_duplicate']} "
        f"flagged={c['flagged_indistinguishable']}"
    )
    if args.strict and enum.flags:
        for f in enum.flags:
            _diag(
                f"flag: {f.kind} candidate #{f.candidate_index} {f.candidate} "
                f"vs entry #{f.neighbor_index} at {f.digits} digits"
            )
        return 3
    return 0


_EVAL_COLUMNS = ("expr", "digits", "value", "exact")


def _integer_part(expr, cap_digits: int) -> int:
    q = exact_rational(expr)
    if q is not None:
        return q.numerator // q.denominator
    # values here are proven irrational, so the floor always separates
    d = DEFAULT_START_DIGITS
    while True:
        lo, hi = eval_interval(expr, digits_to_bits(d))
        if math.floor(lo) == math.floor(hi):
            return math.floor(lo)
        if d >= cap_digits:
            raise DigitUndecidable(
                f"integer part still straddles a whole number at {cap_digits} digits"
            )
        d = min(2 * d, cap_digits)


def decimal_string(expr, k: int, cap_digits: int) -> tuple[str, bool]:
    """The value as `<integer part>.<k fractional digits>` (floor convention)."""
    digits, exact = decimal_digits(expr, k, cap_digits=cap_digits)
    whole = _integer_part(expr, cap_digits)
    return f"{whole}.{digits}", exact


def cmd_eval(args, config: Config) -> int:
    fmt = args.format or config.output_format
    expr = parse(args.expr)
    value, exact = decimal_string(expr, args.digits, config.precision_cap)
    record = {
        "expr": render(expr),
        "digits": args.digits,
        "value": value,
        "exact": exact,
    }
    emitter = Emitter(fmt, _EVAL_COLUMNS, lambda r: r["value"])
    emitter.row(record)
    return 0


_APPROX_COLUMNS = ("weight", "expr", "error_upper_bound")


def _approx_line(r: dict) -> str:
    return f"weight {r['weight']}: {r['expr']} error <= {r['error_upper_bound']}"


def cmd_approx(args, config: Config) -> int:
    fmt = args.format or config.output_format
    target = TargetSpec.of(args.target)
    emitter = Emitter(fmt, _APPROX_COLUMNS, _approx_line)
    if args.weights:
        weights = [int(w) for w in args.weights.split(",")]
        profile = density_profile(target, weights)
        emitter.rows(approx_records(profile))
    else:
        entry, error = best_approx(target, args.max_weight)
        emitter.row(
            {
                "weight": args.max_weight,
                "expr": render(entry.expr),
                "error_upper_bound": error_string(error),
            }
        )
    return 0


_NESTED_COLUMNS = (
    "level",
    "alpha_index",
    "alpha",
    "beta_index",
    "beta",
    "alpha_value",
    "beta_value",
    "scanned",
)


def _nested_line(r: dict) -> str:
    return (
        f"level {r['level']}: alpha #{r['alpha_index']} {r['alpha']} "
        f"({r['alpha_value']})  beta #{r['beta_index']} {r['beta']} "
        f"({r['beta_value']})  scanned {r['scanned']}"
    )


def cmd_nested(args, config: Config) -> int:
    # the bare command emits csv: the trace is tabular by nature
    fmt = args.format or "csv"
    source = make_source(args.source, args.file)
    a = Fraction(args.a)
    b = Fraction(args.b)
    trace = nested_intervals(
        source,
        a,
        b,
        args.depth,
        scan_budget=args.scan_budget,
        cap_digits=config.precision_cap,
    )
    emitter = Emitter(fmt, _NESTED_COLUMNS, _nested_line)
    emitter.rows(nested_records(trace))
    _diag(f"termination: {trace.termination} after {len(trace.levels)} levels")
    return 0


_DIAG_COLUMNS = ("nu", "element", "diag_digit", "out_digit", "position")


def _diag_line(r: dict) -> str:
    return (
        f"nu {r['nu']}: {r['element']} digit {r['diag_digit']} -> "
        f"{r['out_digit']} (first difference at place {r['position']})"
    )


_PROFILE_COLUMNS = ("k", "position", "delta", "lower_bound", "upper_bound", "series")


def _profile_line(r: dict) -> str:
    return (
        f"k {r['k']}: delta {r['delta']} lower {r['lower_bound']} "
        f"upper {r['upper_bound']} series {r['series']}"
    )


def cmd_diagonal(args, config: Config) -> int:
    fmt = args.format or config.output_format
    source = make_source(args.source, args.file)
    if args.profile:
        profile = diagonal_difference_profile(
            source, args.count, cap_digits=config.precision_cap
        )
        emitter = Emitter(fmt, _PROFILE_COLUMNS, _profile_line)
        emitter.rows(profile_records(profile))
        lo, hi = profile.rule_image
        _diag(f"rule image: {lo}..{hi}")
    else:
        result = diagonal(source, args.count, cap_digits=config.precision_cap)
        emitter = Emitter(fmt, _DIAG_COLUMNS, _diag_line)
        emitter.rows(diagonal_records(result))
        emitter.tail("assembled", result.output_prefix())
    return 0


def cmd_verify_prefix(args, config: Config) -> int:
    enum = Enumerator(cap_digits=config.precision_cap)
    report = enum.verify_prefix([e.expr for e in REFERENCE_LISTING])
    sys.stdout.write(report.summary() + "\n")
    return 0 if report.full_match else 1


# --- parser and entry point -------------------------------------------------


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--format",
        choices=FORMATS,
        default=None,
        help="output format (default: config output_format)",
    )


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--source",
        choices=SOURCE_NAMES,
        default="towers",
        help="sequence source (default: towers)",
    )
    p.add_argument(
        "--file",
        default=None,
        metavar="PATH",
        help="input file for --source file: one expression or decimal per line",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powertowers",
        description="Weight-ordered enumeration, evaluation, and sequence "
        "harnesses for power towers of rationals.",
        epilog=f"Config file path is read from ${CONFIG_ENV} when set.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="stream the deduplicated sequence")
    bound = p.add_mutually_exclusive_group(required=True)
    bound.add_argument("--count", type=int, default=None, metavar="N")
    bound.add_argument("--max-weight", type=int, default=None, metavar="W")
    _add_format(p)
    p.add_argument(
        "--checkpoint",
        default=None,
        metavar="PATH",
        help="resume from PATH if present, save the cursor there afterwards",
    )
    p.add_argument(
        "--strict",
        action="store_true",
        help="exit 3 when any value pair stayed indistinguishable at the cap",
    )
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("eval", help="evaluate one expression to k digits")
    p.add_argument("expr", metavar="EXPR")
    p.add_argument("--digits", type=int, required=True, metavar="K")
    _add_format(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("approx", help="closest sequence element to a target")
    p.add_argument(
        "--target",
        required=True,
        help=f"named constant ({', '.join(NAMED_TARGETS)}) or decimal literal",
    )
    bound = p.add_mutually_exclusive_group(required=True)
    bound.add_argument("--max-weight", type=int, default=None, metavar="W")
    bound.add_argument(
        "--weights",
        default=None,
        metavar="W1,W2,...",
        help="ascending weight bounds for a density profile",
    )
    _add_format(p)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("nested", help="first-two-inside interval refinement")
    p.add_argument("--a", required=True, help="left endpoint (fraction or decimal)")
    p.add_argument("--b", required=True, help="right endpoint (fraction or decimal)")
    p.add_argument("--depth", type=int, required=True)
    _add_source(p)
    p.add_argument(
        "--scan-budget",
        type=int,
        default=DEFAULT_SCAN_BUDGET,
        metavar="N",
        help=f"highest source index a level may examine (default {DEFAULT_SCAN_BUDGET})",
    )
    _add_format(p)
    p.set_defaults(func=cmd_nested)

    p = sub.add_parser("diagonal", help="digit-array walk over a source prefix")
    p.add_argument("--count", type=int, required=True, metavar="N")
    _add_source(p)
    p.add_argument(
        "--profile",
        action="store_true",
        help="emit per-element separation bounds instead of the digit rows",
    )
    _add_format(p)
    p.set_defaults(func=cmd_diagonal)

    p = sub.add_parser(
        "verify-prefix", help="align the stream against the frozen hand listing"
    )
    p.set_defaults(func=cmd_verify_prefix)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(os.environ.get(CONFIG_ENV))
        return args.func(args, config)
    except (ConfigError, CheckpointError) as exc:
        _diag(f"config error: {exc}")
        return 2
    except ValueError as exc:
        # ParseError and module precondition failures land here
        _diag(f"error: {exc}")
        return 2
    except OSError as exc:
        _diag(f"error: {exc}")
        return 2
    except BudgetExhausted as exc:
        _diag(f"error: {exc}")
        return 1
    except ArithmeticError as exc:
        # undecidable digits, precision cap, overflow guards
        _diag(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
