"""
harness/main.py

Command-line front end.

    deutsch --f {f1,f2,f3,f4}
    qft     --k K [--inverse] [--literal-phases] [--input N] [--show-matrix]
    shor    --n N --a A [--k K] [--k2 K2] [--max-attempts M] [--seed S]
    grover  --k K --target J [--iterations T] [--seed S]
    verify  [--suite NAME] [--trials T] [--seed S] [--k-range A..B] [--inject-fault]
    export  --algorithm NAME [params] [--format {text,dot}] [--out PATH]

Every subcommand also takes --json PATH, --tolerance EPS, --max-dense-dim D,
--log-level LEVEL and --timings. Results go to standard output, logs and
errors to standard error.

Exit codes: 0 success, 1 a verification check or run residual failed,
2 invalid arguments (including a refused dense operator).
"""

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

# Add repo root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from algorithms.base_algorithm import BaseAlgorithm
from algorithms.deutsch import NAMED_FUNCTIONS, Classification, DeutschFunction
from algorithms.qft import reference_matrix
from harness.algorithm_factory import ALGORITHM_CLASS_MAP, create_algorithm
from harness.config import Settings, load_settings
from harness.report import RunReport, canonical_json, write_report, write_text_artifact
from harness.verification import DEFAULT_TRIALS, SUITE_NAMES, run_verification_suite
from operators.errors import ConsistencyError, QcpuError, ReportWriteError
from qcpu.export import FORMATS, export_network, format_coeff

logger = logging.getLogger("qcpu")
console = Console(highlight=False)
err_console = Console(stderr=True, highlight=False)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


# ─── Parser ──────────────────────────────────────────────────────────────────

def parse_k_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(part) for part in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got '{text}'")
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError(f"need 1 <= A <= B, got {lo}..{hi}")
    return lo, hi


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the report as canonical JSON")
    common.add_argument("--tolerance", type=float, help="base tolerance (env QCPU_TOLERANCE, default 1e-12)")
    common.add_argument("--max-dense-dim", type=int, help="largest dense operator dimension (env QCPU_MAX_DENSE_DIM)")
    common.add_argument("--log-level", help="logging level (env LOG_LEVEL, default WARNING)")
    common.add_argument("--timings", action="store_true", help="include wall_time_ms in JSON reports")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcpu", description="QCPU universal quantum networks")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()

    p = sub.add_parser("deutsch", parents=[common], help="classify f as constant or balanced")
    p.add_argument("--f", choices=list(NAMED_FUNCTIONS), required=True)

    p = sub.add_parser("qft", parents=[common], help="quantum Fourier transform network")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--literal-phases", action="store_true", help="use the 2^k-1 phase denominator")
    p.add_argument("--input", dest="input_index", type=int, help="basis state to transform (default 0)")
    p.add_argument("--show-matrix", action="store_true")

    p = sub.add_parser("shor", parents=[common], help="order finding and factoring")
    p.add_argument("--n", dest="composite", type=int, required=True)
    p.add_argument("--a", dest="base", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--k2", type=int)
    p.add_argument("--max-attempts", type=int)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("grover", parents=[common], help="single-target search")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suite", choices=SUITE_NAMES, default="all")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-range", type=parse_k_range)
    p.add_argument("--inject-fault", action="store_true", help="flip one factor coefficient (harness self-test)")

    p = sub.add_parser("export", parents=[common], help="draw an algorithm's network")
    p.add_argument("--algorithm", choices=list(ALGORITHM_CLASS_MAP), required=True)
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--f", choices=list(NAMED_FUNCTIONS), default="f1")
    p.add_argument("--k", type=int)
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--n", dest="composite", type=int)
    p.add_argument("--a", dest="base", type=int)
    p.add_argument("--k2", type=int)
    p.add_argument("--target", type=int)
    p.add_argument("--iterations", type=int)

    return parser


# ─── Setup ───────────────────────────────────────────────────────────────────

def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(rich_tracebacks=True, markup=True, console=Console(stderr=True))],
    )
    logging.getLogger().setLevel(level)


def config_for(algorithm: BaseAlgorithm, args: argparse.Namespace) -> BaseModel:
    """Validated config for `algorithm` from whichever flags the subcommand defines."""
    if algorithm.NAME == "deutsch":
        return DeutschFunction.named(args.f)
    names = {
        "qft": ("k", "inverse", "literal_phases", "input_index"),
        "shor": ("composite", "base", "k", "k2", "max_attempts"),
        "grover": ("k", "target", "iterations"),
    }[algorithm.NAME]
    return algorithm.parse_config(**{n: getattr(args, n, None) for n in names})


def _emit(line: str) -> None:
    console.print(line, markup=False, soft_wrap=True)


def _finish_run(algorithm: BaseAlgorithm, report: RunReport, args: argparse.Namespace) -> int:
    if args.json:
        write_report(report, args.json, include_timings=args.timings)
    failing = algorithm.failing_residuals(report)
    for name, (value, tol) in failing.items():
        err_console.print(f"residual {name}={value:.3e} exceeds {tol:.1e}", markup=False)
    return EXIT_FAILED if failing else EXIT_OK


# ─── Subcommands ─────────────────────────────────────────────────────────────

def cmd_deutsch(args: argparse.Namespace, settings: Settings) -> int:
    algorithm = create_algorithm("deutsch", settings)
    report = algorithm.run(config_for(algorithm, args))
    _emit(Classification(report.outcome).describe())
    return _finish_run(algorithm, report, args)


def cmd_qft(args: argparse.Namespace, settings: Settings) -> int:
    algorithm = create_algorithm("qft", settings)
    config = config_for(algorithm, args)
    report = algorithm.run(config)
    _emit(f"qft k={config.k} factors={report.details['factors']} network_block={report.residuals['network_block']:.3e}")
    for index, (re, im) in enumerate(report.amplitudes):
        _emit(f"{index}: {format_coeff(complex(re, im))}")
    if args.show_matrix:
        f = reference_matrix(config)
        table = Table(title="F⁻¹" if config.inverse else "F", show_header=True, header_style="bold magenta")
        table.add_column("m\\n", style="cyan")
        for n in range(f.shape[1]):
            table.add_column(str(n))
        for m in range(f.shape[0]):
            table.add_row(str(m), *(format_coeff(v) for v in f[m]))
        console.print(table)
    return _finish_run(algorithm, report, args)


def cmd_shor(args: argparse.Namespace, settings: Settings) -> int:
    algorithm = create_algorithm("shor", settings)
    config = config_for(algorithm, args)
    report = algorithm.run(config, args.seed)
    if report.factors:
        _emit(f"factors {report.factors[0]} {report.factors[1]}")
    else:
        _emit(f"no factors after {report.details['attempts']} attempt(s): {report.details.get('failure')}")
    if report.outcome is not None:
        _emit(f"y={report.outcome} r={report.details.get('period_candidate')} u={report.details.get('measured_residue')}")
    return _finish_run(algorithm, report, args)


def cmd_grover(args: argparse.Namespace, settings: Settings) -> int:
    algorithm = create_algorithm("grover", settings)
    config = config_for(algorithm, args)
    report = algorithm.run(config, args.seed)
    _emit(f"outcome {report.outcome}")
    _emit(f"P(target={config.target}) = {report.details['success_probability']:.12f} after {config.iterations} iteration(s)")
    return _finish_run(algorithm, report, args)


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    result = run_verification_suite(
        args.suite,
        trials=args.trials,
        seed=args.seed,
        settings=settings,
        k_range=args.k_range,
        inject_fault=args.inject_fault,
    )
    _emit(f"suite {result.suite}: {result.cases_run} case(s), {len(result.failures)} failure(s)")
    if result.failures:
        table = Table(title="Failures", show_header=True, header_style="bold red")
        table.add_column("case", style="cyan")
        table.add_column("residual")
        table.add_column("tolerance")
        for f in result.failures:
            table.add_row(f.case_id, f"{f.residual:.3e}", f"{f.tolerance:.1e}")
        console.print(table)
    if args.json:
        write_text_artifact(args.json, canonical_json(result))
    return EXIT_OK if result.passed else EXIT_FAILED


def cmd_export(args: argparse.Namespace, settings: Settings) -> int:
    algorithm = create_algorithm(args.algorithm, settings)
    network = algorithm.build_network(config_for(algorithm, args))
    text = export_network(network, args.format)
    if args.out:
        write_text_artifact(args.out, text)
        _emit(f"wrote {args.out}")
    else:
        console.out(text, end="", highlight=False)
    return EXIT_OK


COMMANDS = {
    "deutsch": cmd_deutsch,
    "qft":     cmd_qft,
    "shor":    cmd_shor,
    "grover":  cmd_grover,
    "verify":  cmd_verify,
    "export":  cmd_export,
}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        settings = load_settings(args.tolerance, args.max_dense_dim, args.log_level)
    except ValidationError as e:
        err_console.print(f"error: invalid settings: {escape(str(e))}")
        return EXIT_USAGE
    configure_logging(settings.log_level)

    try:
        return COMMANDS[args.command](args, settings)
    except ConsistencyError as e:
        err_console.print(f"error: {escape(str(e))}")
        return EXIT_FAILED
    except ReportWriteError as e:
        err_console.print(f"error: {escape(str(e))}")
        return EXIT_USAGE
    except ValidationError as e:
        err_console.print(f"error: invalid parameters: {escape(str(e))}")
        return EXIT_USAGE
    except (QcpuError, ValueError) as e:
        err_console.print(f"error: {escape(str(e))}")
        return EXIT_USAGE


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
