#!/usr/bin/env python3
"""Selmer Pairing - CLI entrypoint for 2-descent with the Cassels-Tate pairing."""

import argparse
import contextlib
import logging
import sys
from pathlib import Path
from typing import Any, Callable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ValidationError

from .config import DEFAULT_HEIGHT_BOUND, DEFAULT_MAX_WORKERS, DEFAULT_SEED, EXTENDED_HEIGHT_BOUND
from .exceptions import InvalidInputError, PrecisionExhaustedError, SelmerPairingError
from .metrics import set_system_info
from .pairing import corpus_curves
from .report_models import ErrorInfo, OutputFormat, RunConfig
from .service import DescentService
from .symbols import inject_symbol_fault
from .utils import format_report_text, format_scan_text, format_verify_text, report_filename, report_to_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_PRECISION = 2
EXIT_VERIFY_FAILED = 3

_SUBCOMMANDS = ("run", "verify", "scan")
_VALUE_FLAGS = ("--roots", "--ab", "--range", "--curve")


def parse_int_list(value: str, count: int) -> Tuple[int, ...]:
    """Parse a comma-separated list of exactly ``count`` integers.

    Args:
        value: String such as '-1,0,1'.
        count: Required number of entries.

    Returns:
        Tuple of integers.
    """
    try:
        items = tuple(int(item.strip()) for item in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected {count} comma-separated integers, got '{value}'")
    if len(items) != count:
        raise argparse.ArgumentTypeError(f"expected {count} comma-separated integers, got '{value}'")
    return items


def _normalize_argv(argv: Sequence[str]) -> List[str]:
    """Attach values starting with '-' to their flag and default the subcommand to 'run'."""
    out: List[str] = []
    args = list(argv)
    i = 0
    while i < len(args):
        arg = args[i]
        if arg in _VALUE_FLAGS and i + 1 < len(args):
            out.append(f"{arg}={args[i + 1]}")
            i += 2
            continue
        out.append(arg)
        i += 1
    if not any(a in _SUBCOMMANDS for a in out) and not any(a in ("-h", "--help") for a in out):
        out.insert(0, "run")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selmer-pairing",
        description="2-descent on y^2 = (x - e1)(x - e2)(x - e3) refined by the Cassels-Tate pairing",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Selmer group, pairing matrix and rank bound
  python -m selmer_pairing --roots -1,0,1

  # Same curve as --roots -6,0,6, JSON report
  python -m selmer_pairing run --ab 6,6 --json

  # Property suite
  python -m selmer_pairing verify --roots -6,0,6

  # Corpus scan for curves where the pairing improves the bound
  python -m selmer_pairing scan --range -5,5

  # Scan an explicit list of curves
  python -m selmer_pairing scan --curve -17,0,17 --curve -6,0,6
""",
    )
    common = argparse.ArgumentParser(add_help=False)
    curve = common.add_mutually_exclusive_group()
    curve.add_argument("--roots", type=lambda s: parse_int_list(s, 3), help="Roots e1,e2,e3")
    curve.add_argument("--ab", type=lambda s: parse_int_list(s, 2), help="a,b meaning y^2 = x(x - a)(x + b)")
    common.add_argument(
        "--height-bound",
        type=int,
        default=DEFAULT_HEIGHT_BOUND,
        help=f"Naive height bound for the rational point search (default: {DEFAULT_HEIGHT_BOUND})",
    )
    common.add_argument("--precision", type=int, default=None, help="Base p-adic precision override")
    common.add_argument("--json", action="store_true", help="Emit JSON instead of text")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"Random seed (default: {DEFAULT_SEED})")
    common.add_argument(
        "--workers",
        type=int,
        default=DEFAULT_MAX_WORKERS,
        help=f"Threads for pairing entries (default: {DEFAULT_MAX_WORKERS})",
    )
    common.add_argument("--out-dir", type=str, default=None, help="Also write the JSON report into this directory")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose output")
    common.add_argument("--inject-symbol-fault", type=int, default=None, help=argparse.SUPPRESS)

    sub = parser.add_subparsers(dest="command")
    sub.add_parser("run", parents=[common], help="Run the descent and print the report")
    sub.add_parser("verify", parents=[common], help="Run the property suite")
    scan = sub.add_parser("scan", parents=[common], help="Scan the corpus of small root triples")
    scan.add_argument(
        "--range",
        dest="root_range",
        type=lambda s: parse_int_list(s, 2),
        default=None,
        help="Root range lo,hi for the corpus (default: config)",
    )
    scan.add_argument(
        "--curve",
        dest="curves",
        action="append",
        type=lambda s: parse_int_list(s, 3),
        default=None,
        help="Scan this root triple instead of the corpus (repeatable)",
    )
    scan.add_argument(
        "--extended-bound",
        type=int,
        default=EXTENDED_HEIGHT_BOUND,
        help=f"Height bound of the extended search (default: {EXTENDED_HEIGHT_BOUND})",
    )
    return parser


def _emit(text: str, filename: Optional[str], out_dir: Optional[str]) -> None:
    sys.stdout.write(text)
    if out_dir and filename:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / filename).write_text(text, encoding="utf-8")


def _emit_report(
    report: BaseModel,
    formatter: Callable[[Any], str],
    output_format: OutputFormat,
    filename: str,
    out_dir: Optional[str],
) -> None:
    """Print a report in the requested format; JSON reports are also written under out_dir."""
    if output_format == OutputFormat.JSON:
        _emit(report_to_json(report), filename, out_dir)
    else:
        _emit(formatter(report), None, out_dir)


def _fail(code: int, info: ErrorInfo, output_format: OutputFormat) -> int:
    if output_format == OutputFormat.JSON:
        sys.stderr.write(report_to_json(info))
    else:
        suffix = f" ({info.details})" if info.details else ""
        sys.stderr.write(f"Error: {info.message}{suffix}\n")
    return code


def _scan_curves(args: argparse.Namespace) -> Optional[List[Tuple[int, int, int]]]:
    """Explicit --curve triples, else the --range corpus, else None for the configured default."""
    if args.curves:
        return list(args.curves)
    if args.root_range:
        return corpus_curves(*args.root_range)
    return None


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, dispatch the subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(_normalize_argv(sys.argv[1:] if argv is None else argv))
    except SystemExit as e:
        # argparse exits 2 on usage errors; 2 is reserved for precision exhaustion
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID_INPUT

    log_level = logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=log_level, format="%(levelname)s: %(message)s")
    set_system_info(command=args.command or "run")

    output_format = OutputFormat.JSON if args.json else OutputFormat.TEXT
    service = DescentService(seed=args.seed, precision=args.precision, max_workers=args.workers)

    fault = inject_symbol_fault(args.inject_symbol_fault) if args.inject_symbol_fault else contextlib.nullcontext()
    try:
        with fault:
            if args.command == "scan":
                scan_report = service.scan(
                    _scan_curves(args), height_bound=args.height_bound, extended_bound=args.extended_bound
                )
                _emit_report(scan_report, format_scan_text, output_format, "scan.json", args.out_dir)
                return EXIT_OK

            if args.roots is None and args.ab is None:
                return _fail(
                    EXIT_INVALID_INPUT,
                    ErrorInfo(code="invalid_input", message="one of --roots or --ab is required"),
                    output_format,
                )
            config = RunConfig(
                roots=args.roots,
                ab=args.ab,
                height_bound=args.height_bound,
                precision=args.precision,
                output_format=output_format,
                seed=args.seed,
                max_workers=args.workers,
            )
            if args.command == "verify":
                verify_report = service.verify(config)
                filename = report_filename("verify", verify_report.curve)
                _emit_report(verify_report, format_verify_text, config.output_format, filename, args.out_dir)
                return EXIT_OK if verify_report.passed else EXIT_VERIFY_FAILED

            descent_report = service.run(config)
            filename = report_filename("descent", descent_report.curve)
            _emit_report(descent_report, format_report_text, config.output_format, filename, args.out_dir)
            return EXIT_OK
    except ValidationError as e:
        return _fail(EXIT_INVALID_INPUT, ErrorInfo(code="invalid_input", message=str(e)), output_format)
    except InvalidInputError as e:
        return _fail(EXIT_INVALID_INPUT, ErrorInfo(code=e.code, message=e.message, details=e.details), output_format)
    except PrecisionExhaustedError as e:
        return _fail(EXIT_PRECISION, ErrorInfo(code=e.code, message=e.message, details=e.details), output_format)
    except SelmerPairingError as e:
        logger.error(f"{e.code}: {e.message}")
        return _fail(EXIT_INVALID_INPUT, ErrorInfo(code=e.code, message=e.message, details=e.details), output_format)


def main():
    """Main entry point for the Selmer Pairing CLI."""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
