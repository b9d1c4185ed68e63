"""
Trispin: Command-line Interface

    python cli.py build geodesic --kappa 1 --J 1
    python cli.py verify --builtin swap13 --target swap13
    python cli.py verify --sequence seq.json --target trilinear --theta 3.14159
    python cli.py verify --builtin geodesic --kappa 1 --term "0.25 I1z I2z I3z"
    python cli.py table1 --J 1
    python cli.py sweep --points 201 > curves.csv
    python cli.py selftest --seed 0xC0FFEE

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 I/O or format error.
Logging goes to stderr so stdout is reproducible byte for byte.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from pydantic import TypeAdapter

from analysis import check_table_against_builders, duration_table, sweep, sweep_to_csv
from config import APP_NAME, APP_VERSION, DEFAULT_SWEEP_POINTS, FIDELITY_TOL, settings
from errors import TrispinError
from models import ExitCode, OutputFormat, SequenceName, TargetName
from schemas import DurationRow, PulseSequence, SpinSystem, SweepRow, VerificationReport
from selftest import run_selftest
from sequences import build_named
from verify import verify_against

logger = logging.getLogger(__name__)

REPORTS = TypeAdapter(list[VerificationReport])
ROWS = TypeAdapter(list[DurationRow])
SWEEP_ROWS = TypeAdapter(list[SweepRow])


# ──────────────────────────────────────────────────────────────────
# Output helpers
# ──────────────────────────────────────────────────────────────────

def _emit(text: str, out: Optional[str]):
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _report_text(report: VerificationReport) -> str:
    status = "PASS" if report.passed else "FAIL"
    parts = [f"{status} {report.label}"]
    if report.target_fidelity > 0:
        parts.append(f"fidelity={report.achieved:.15f}")
    parts.extend(f"{name}={value:.3e}" for name, value in report.residuals.items())
    line = "  ".join(parts)
    for note in report.notes:
        line += f"\n     # {note}"
    return line


def _table_text(rows: list[DurationRow]) -> str:
    width = max(len(r.label) for r in rows)
    lines = [f"{'transformation':<{width}}  {'tau (s)':>12}  {'tau* (s)':>12}  {'tau*/tau':>9}"]
    for r in rows:
        lines.append(
            f"{r.label:<{width}}  {r.tau_conventional_s:>12.7f}  {r.tau_geodesic_s:>12.7f}  {r.ratio:>9.6f}"
        )
    return "\n".join(lines)


def _seed(text: str) -> int:
    return int(text, 0)


# ──────────────────────────────────────────────────────────────────
# Commands
# ──────────────────────────────────────────────────────────────────

def cmd_build(args) -> int:
    seq = build_named(args.name, theta=args.theta, kappa=args.kappa, J=args.J, axes=args.axes, xy_only=args.xy_only)
    _emit(seq.to_json(), args.out)
    return ExitCode.OK


def cmd_verify(args) -> int:
    if args.sequence:
        try:
            text = Path(args.sequence).read_text(encoding="utf-8")
        except OSError as e:
            print(f"error: cannot read {args.sequence}: {e.strerror}", file=sys.stderr)
            return ExitCode.IO_FORMAT
        seq = PulseSequence.from_json(text)
    else:
        seq = build_named(args.builtin, theta=args.theta, kappa=args.kappa, J=args.J, axes=args.axes)

    system = SpinSystem.chain(seq.n, args.J)
    report = verify_against(seq, system, args.target, args.theta, args.kappa, args.axes, args.tol, args.term)
    text = report.model_dump_json(indent=2) if args.format == OutputFormat.JSON.value else _report_text(report)
    _emit(text, args.out)
    return ExitCode.OK if report.passed else ExitCode.VERIFICATION_FAILED


def cmd_table1(args) -> int:
    rows = duration_table(args.J, args.kappa)
    check = check_table_against_builders(rows, args.J, args.kappa)
    if args.format == OutputFormat.JSON.value:
        _emit(ROWS.dump_json(rows, indent=2).decode(), args.out)
    else:
        _emit(_table_text(rows), args.out)
    if not check.passed:
        print(f"error: {_report_text(check)}", file=sys.stderr)
        return ExitCode.VERIFICATION_FAILED
    return ExitCode.OK


def cmd_sweep(args) -> int:
    rows = sweep(args.kappa_min, args.kappa_max, args.points, args.J)
    if args.format == OutputFormat.JSON.value:
        _emit(SWEEP_ROWS.dump_json(rows, indent=2).decode(), args.out)
    else:
        _emit(sweep_to_csv(rows), args.out)
    return ExitCode.OK


def cmd_selftest(args) -> int:
    seed = settings.SEED if args.seed is None else args.seed
    reports = run_selftest(seed, tol=args.tol, J=args.J)
    if args.format == OutputFormat.JSON.value:
        text = REPORTS.dump_json(reports, indent=2).decode()
    else:
        failed = [r.label for r in reports if not r.passed]
        summary = f"{len(reports) - len(failed)}/{len(reports)} checks passed"
        if failed:
            summary += f"; failed: {', '.join(failed)}"
        text = "\n".join([_report_text(r) for r in reports] + [summary])
    _emit(text, args.out)
    return ExitCode.OK if all(r.passed for r in reports) else ExitCode.VERIFICATION_FAILED


# ──────────────────────────────────────────────────────────────────
# Parser
# ──────────────────────────────────────────────────────────────────

def _angle_flags(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--theta", type=float, help="rotation angle in radians, [0, 4π]")
    group.add_argument("--kappa", type=float, help="rotation angle as θ/2π, [0, 2]")
    parser.add_argument("--axes", default="zzz", help="per-spin axes of the trilinear term (default zzz)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--J", type=float, default=1.0, help="coupling J12 = J23 in Hz (default 1)")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug (stderr)")

    parser = argparse.ArgumentParser(prog="trispin", description=f"{APP_NAME} {APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("build", parents=[common], help="emit a built-in pulse sequence as JSON")
    p.add_argument("name", choices=[s.value for s in SequenceName])
    _angle_flags(p)
    p.add_argument("--xy-only", action="store_true", help="rewrite z pulses as x/y pulse triples")
    p.add_argument("--format", choices=[OutputFormat.JSON.value], default=OutputFormat.JSON.value)
    p.set_defaults(handler=cmd_build)

    p = commands.add_parser("verify", parents=[common], help="verify a sequence against a target propagator")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--builtin", choices=[s.value for s in SequenceName])
    source.add_argument("--sequence", help="path to a JSON pulse sequence")
    targets = p.add_mutually_exclusive_group(required=True)
    targets.add_argument("--target", choices=[t.value for t in TargetName])
    targets.add_argument("--term", help='product-operator term, target exp(-iθ·term), e.g. "0.25 I1z I2z I3z"')
    _angle_flags(p)
    p.add_argument("--tol", type=float, default=FIDELITY_TOL, help="allowed infidelity (default 1e-9)")
    p.add_argument("--format", choices=[OutputFormat.JSON.value, OutputFormat.TEXT.value], default=OutputFormat.JSON.value)
    p.set_defaults(handler=cmd_verify)

    p = commands.add_parser("table1", parents=[common], help="duration comparison table")
    p.add_argument("--kappa", type=float, default=1.0, help="κ of the generic row (default 1)")
    p.add_argument("--format", choices=[OutputFormat.TEXT.value, OutputFormat.JSON.value], default=OutputFormat.TEXT.value)
    p.set_defaults(handler=cmd_table1)

    p = commands.add_parser("sweep", parents=[common], help="duration curves over κ as CSV")
    p.add_argument("--kappa-min", type=float, default=0.0)
    p.add_argument("--kappa-max", type=float, default=2.0)
    p.add_argument("--points", type=int, default=DEFAULT_SWEEP_POINTS)
    p.add_argument("--format", choices=[OutputFormat.CSV.value, OutputFormat.JSON.value], default=OutputFormat.CSV.value)
    p.set_defaults(handler=cmd_sweep)

    p = commands.add_parser("selftest", parents=[common], help="run the full invariant suite")
    p.add_argument("--seed", type=_seed, help="pseudo-random seed (default TRISPIN_SEED or 0xC0FFEE)")
    p.add_argument("--tol", type=float, default=FIDELITY_TOL, help="allowed infidelity for sequence checks")
    p.add_argument("--format", choices=[OutputFormat.TEXT.value, OutputFormat.JSON.value], default=OutputFormat.TEXT.value)
    p.set_defaults(handler=cmd_selftest)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return int(args.handler(args))
    except TrispinError as e:
        print(f"error: {e}", file=sys.stderr)
        return int(e.exit_code)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return int(ExitCode.IO_FORMAT)


if __name__ == "__main__":
    sys.exit(main())
