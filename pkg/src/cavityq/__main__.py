"""Main entry point for cavityq."""

import argparse
import sys
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from itertools import product
from pathlib import Path
from typing import Any, TextIO

import numpy as np
from pydantic import ValidationError

from cavityq.coherent import coherent_qfunction
from cavityq.config import (
    OutputFormat,
    QFuncOptions,
    Settings,
    StatsOptions,
    VerifyOptions,
    merge_options,
    split_list,
)
from cavityq.errors import EXIT_USAGE, CavityQError, MalformedInputError
from cavityq.logging import configure_logging, get_logger
from cavityq.metrics import write_metrics
from cavityq.models import STEADY, Observable, SweepSpec, Time
from cavityq.output import Value, write_csv, write_report
from cavityq.subharmonic import subharmonic_qfunction
from cavityq.superposition import marginal, superpose
from cavityq.sweep import stats_report, write_sweep
from cavityq.verify import run_verification

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_IO = 4

STDOUT_PATH = "-"
# Options whose value may start with a minus sign
VALUE_OPTIONS = frozenset({"--grid"})

Command = Callable[[dict[str, Any], Settings], int]


@contextmanager
def _open_output(path: Path | str | None) -> Iterator[TextIO]:
    """Yield standard output for None or ``-``, else the opened file."""
    if path is None or str(path) == STDOUT_PATH:
        yield sys.stdout
        return
    with Path(path).open("w", encoding="utf-8", newline="") as stream:
        yield stream


def cmd_stats(values: dict[str, Any], _settings: Settings) -> int:
    """Print the observable report."""
    options = StatsOptions.model_validate(values)
    t: Time = STEADY if options.steady or options.time is None else options.time
    items = stats_report(options.params, t, options.only)
    if options.format is OutputFormat.CSV:
        write_csv(sys.stdout, ["observable", "value"], items)
    else:
        write_report(sys.stdout, items)
    return EXIT_OK


def cmd_sweep(values: dict[str, Any], _settings: Settings) -> int:
    """Write the gamma sweep as CSV."""
    out = values.pop("out", None)
    if out is None:
        raise MalformedInputError("sweep needs --out PATH (use - for standard output)")
    if "observables" in values:
        values["observables"] = split_list(values["observables"])
    spec = SweepSpec.model_validate(values)
    with _open_output(out) as stream:
        write_sweep(stream, spec)
    return EXIT_OK


def qfunc_rows(options: QFuncOptions) -> list[list[Value]]:
    """Sample the superposed Q-function (or its marginal) on the grid."""
    params = options.params
    t = STEADY if options.time is None else options.time
    q_sup = superpose(coherent_qfunction(params, t), subharmonic_qfunction(params))
    grid = options.grid
    axis = [float(x) for x in np.linspace(grid.minimum, grid.maximum, grid.count)]
    if options.marginal:
        single = marginal(q_sup)
        return [
            [re, im, float(single.evaluate(complex(re, im)))] for re, im in product(axis, axis)
        ]
    rows: list[list[Value]] = []
    for re_a, im_a, re_b, im_b in product(axis, repeat=4):
        value = float(q_sup.evaluate(complex(re_a, im_a), complex(re_b, im_b)))
        rows.append([re_a, im_a, re_b, im_b, value])
    return rows


def cmd_qfunc(values: dict[str, Any], _settings: Settings) -> int:
    """Write sampled Q values as CSV."""
    options = QFuncOptions.model_validate(values)
    header = (
        ["re_alpha", "im_alpha", "Q"]
        if options.marginal
        else ["re_a", "im_a", "re_b", "im_b", "Q"]
    )
    rows = qfunc_rows(options)
    with _open_output(options.out) as stream:
        write_csv(stream, header, rows)
    return EXIT_OK


def cmd_verify(values: dict[str, Any], settings: Settings) -> int:
    """Run the oracle suite and print one CHECK line per comparison."""
    options = VerifyOptions.model_validate(values)
    report = run_verification(
        options.params,
        fock_dim=options.fock_dim,
        tol=options.tol if options.tol is not None else settings.tol,
        default_dim=settings.fock_dim,
    )
    for line in report.lines():
        sys.stdout.write(line + "\n")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


COMMANDS: dict[str, Command] = {
    "stats": cmd_stats,
    "sweep": cmd_sweep,
    "qfunc": cmd_qfunc,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation.

    Every option defaults to None so that values from ``--config`` survive
    unless the flag is actually given.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value options file")
    common.add_argument("--metrics-file", type=Path, help="write Prometheus metrics here")
    common.add_argument("--kappa", type=float, help="cavity damping constant")
    common.add_argument("--epsilon", type=float, help="coherent drive amplitude")

    parser = argparse.ArgumentParser(
        prog="cavityq",
        description="Quantum statistics of superposed coherent and subharmonic cavity light.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    stats = commands.add_parser("stats", parents=[common], help="print observables")
    stats.add_argument("--gamma", type=float, help="parametric coupling")
    stats.add_argument("--time", type=float, help="evaluation time")
    stats.add_argument("--steady", action="store_true", default=None, help="steady state")
    stats.add_argument("--format", choices=[f.value for f in OutputFormat])
    stats.add_argument("--only", help="comma-separated observables to print")

    sweep = commands.add_parser("sweep", parents=[common], help="gamma sweep as CSV")
    sweep.add_argument("--gamma-min", type=float)
    sweep.add_argument("--gamma-max", type=float)
    sweep.add_argument("--steps", type=int)
    sweep.add_argument(
        "--observables",
        help="comma-separated subset of: " + ", ".join(o.value for o in Observable),
    )
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--out", help="output CSV path (- for standard output)")

    qfunc = commands.add_parser("qfunc", parents=[common], help="sample the Q-function")
    qfunc.add_argument("--gamma", type=float, help="parametric coupling")
    qfunc.add_argument("--grid", help="min:max:count for both real and imaginary axes")
    qfunc.add_argument("--marginal", action="store_true", default=None)
    qfunc.add_argument("--time", type=float)
    qfunc.add_argument("--out", type=Path)

    verify = commands.add_parser("verify", parents=[common], help="run the oracle suite")
    verify.add_argument("--gamma", type=float, help="parametric coupling")
    verify.add_argument("--fock-dim", type=int, help="fixed Fock cutoff per mode")
    verify.add_argument("--tol", type=float, help="composite comparison tolerance")

    return parser


def attach_option_values(argv: Sequence[str]) -> list[str]:
    """Join each option in VALUE_OPTIONS with its value, as in ``--grid=-6:6:201``.

    argparse reads a separate value starting with ``-`` as another option.
    """
    attached: list[str] = []
    pending: str | None = None
    for arg in argv:
        if pending is not None:
            attached.append(f"{pending}={arg}")
            pending = None
        elif arg in VALUE_OPTIONS:
            pending = arg
        else:
            attached.append(arg)
    if pending is not None:
        attached.append(pending)
    return attached


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point for the cavityq command line."""
    args = build_parser().parse_args(attach_option_values(sys.argv[1:] if argv is None else argv))
    try:
        settings = Settings()
    except ValidationError as e:
        sys.stderr.write(f"invalid environment settings:\n{e}\n")
        return EXIT_USAGE
    configure_logging(settings.log_level, settings.log_format)
    logger = get_logger(__name__)

    flags = vars(args)
    command = flags.pop("command")
    config_path = flags.pop("config")
    metrics_file = flags.pop("metrics_file") or settings.metrics_file

    try:
        values = merge_options(config_path, flags)
        logger.debug("command_options", command=command, options=values)
        exit_code = COMMANDS[command](values, settings)
    except ValidationError as e:
        logger.error("invalid_options", command=command, errors=e.errors(include_url=False))
        exit_code = EXIT_USAGE
    except CavityQError as e:
        logger.error(
            "command_failed",
            command=command,
            error_type=type(e).__name__,
            error_message=str(e),
        )
        exit_code = e.exit_code
    except OSError as e:
        logger.error("output_failed", command=command, error_message=str(e))
        exit_code = EXIT_IO

    if metrics_file is not None:
        try:
            write_metrics(metrics_file)
        except OSError as e:
            logger.error("metrics_write_failed", path=str(metrics_file), error_message=str(e))
            exit_code = exit_code or EXIT_IO
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
