import argparse
import json
import logging
import sys
from enum import StrEnum
from pathlib import Path
from typing import Optional, Sequence

from walsh.config.constructions import build
from walsh.config.settings import get_settings
from walsh.exceptions import SelectionError, WalshError
from walsh.schemas.assignment import VerificationMethod
from walsh.schemas.matrix import BinaryMatrix, ConstructionKind
from walsh.services import bounds, hall, pool_sim
from walsh.services.banded_assign import dispatch_assignment
from walsh.services.bitmatrix import from_table, to_table
from walsh.services.formats import read_matrix, read_table, write_matrix, write_table
from walsh.services.logger import get_logger, set_level

logger = get_logger(__name__)


class bcolors:
    OKCYAN = "\033[96m"
    OKGREEN = "\033[92m"
    MAGENTA = "\033[35m"
    WARNING = "\033[93m"
    FAIL = "\033[91m"
    ENDC = "\033[0m"


class ExitCode:
    OK = 0
    NEGATIVE = 1
    USAGE = 2


class OutputFormat(StrEnum):
    TEXT = "text"
    STRUCTURED = "structured"


def print_styled(text: str, color: str = bcolors.ENDC):
    # diagnostics only, records go to stdout through emit()
    if sys.stderr.isatty():
        text = color + text + bcolors.ENDC
    print(text, file=sys.stderr)


def emit(args: argparse.Namespace, lines: Sequence[str], record: dict) -> None:
    if args.format == OutputFormat.STRUCTURED:
        print(json.dumps(record, default=str))
    else:
        for line in lines:
            print(line)


def _report_lines(m: BinaryMatrix) -> tuple[list[str], dict]:
    report = bounds.analyze(m)
    return [f"{key}: {value}" for key, value in report.to_table()], dict(report.to_table())


def generate(args: argparse.Namespace) -> int:
    # build before touching the output path so bad input writes nothing
    m = build(ConstructionKind(args.kind), args.k, args.n)
    write_matrix(m, args.out)
    print_styled(f"Wrote {m.n}x{m.k} {args.kind} matrix to {args.out}", bcolors.OKGREEN)

    lines, record = _report_lines(m)
    emit(args, lines, record)
    return ExitCode.OK


def verify(args: argparse.Namespace) -> int:
    m = read_matrix(args.input)
    report = hall.verify(m, VerificationMethod(args.method))

    emit(args, [report.to_record()], report.model_dump(mode="json"))
    return ExitCode.OK if report.holds else ExitCode.NEGATIVE


def _parse_users(text: str) -> list[int]:
    try:
        return [int(user) for user in text.split(",") if user.strip()]
    except ValueError as e:
        raise SelectionError(
            f"users must be a comma separated list of integers, got {text!r}"
        ) from e


def assign(args: argparse.Namespace) -> int:
    m = read_matrix(args.input)
    dispatch = dispatch_assignment(m, _parse_users(args.users))

    if dispatch.violation is not None:
        emit(args, [dispatch.violation.to_record()], dispatch.violation.model_dump(mode="json"))
        return ExitCode.NEGATIVE

    lines = dispatch.assignment.to_lines()
    record = {"path": dispatch.path, "pairs": dispatch.assignment.pairs}
    if args.trace:
        if dispatch.fast_result is None:
            print_styled("No relocations: the matching path was used", bcolors.WARNING)
        else:
            trace = dispatch.fast_result.trace
            lines += [move.to_line() for move in trace]
            record["trace"] = [move.model_dump() for move in trace]
            record["elementary_operations"] = dispatch.fast_result.elementary_operations

    emit(args, lines, record)
    return ExitCode.OK


def bounds_report(args: argparse.Namespace) -> int:
    lines, record = _report_lines(read_matrix(args.input))
    emit(args, lines, record)
    return ExitCode.OK


def simulate(args: argparse.Namespace) -> int:
    cfg = pool_sim.load_config(args.config)
    if args.seed is not None:
        cfg = cfg.model_copy(update={"seed": args.seed})

    result = pool_sim.run_simulation(cfg)
    pool_sim.write_records(result, sys.stdout)
    if args.loads:
        for load in pool_sim.monitor_load(result):
            print(json.dumps({"load": load.model_dump(mode="json")}))

    summary = result.summary
    color = bcolors.FAIL if summary.failures else bcolors.OKGREEN
    print_styled(
        f"{summary.frames} frames, {summary.requests} requests, {summary.failures} failures",
        color,
    )
    return ExitCode.NEGATIVE if summary.failures else ExitCode.OK


def table(args: argparse.Namespace) -> int:
    if args.input.suffix == ".wat":
        write_matrix(from_table(read_table(args.input)), args.out)
    else:
        write_table(to_table(read_matrix(args.input)), args.out)
    print_styled(f"Wrote {args.out}", bcolors.OKGREEN)
    return ExitCode.OK


def search(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else get_settings().default_seed
    report = bounds.search_min_ones(args.n, args.k, trials=args.trials, seed=seed)
    lines = [
        f"empirical: {report.method} search",
        f"lower_bound: {report.lower_bound}",
        f"min_ones_found: {report.min_ones_found}",
        f"attained: {str(report.attained).lower()}",
    ]
    emit(args, lines, report.model_dump(mode="json", exclude={"example"}))
    return ExitCode.OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=[f.value for f in OutputFormat], default=OutputFormat.TEXT
    )
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="walsh", description="Walsh code assignment matrices"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("generate", parents=[common], help="build a matrix file")
    p.add_argument(
        "kind",
        choices=[ConstructionKind.BANDED.value, ConstructionKind.AUGMENTED.value],
    )
    p.add_argument("k", type=int)
    p.add_argument("n", type=int)
    p.add_argument("out", type=Path)
    p.set_defaults(handler=generate)

    p = commands.add_parser("verify", parents=[common], help="check the assignment property")
    p.add_argument("input", type=Path)
    p.add_argument(
        "--method", choices=[m.value for m in VerificationMethod], default="auto"
    )
    p.set_defaults(handler=verify)

    p = commands.add_parser("assign", parents=[common], help="assign codes to users")
    p.add_argument("input", type=Path)
    p.add_argument("users", help="comma separated 1-based user indices")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(handler=assign)

    p = commands.add_parser("bounds", parents=[common], help="optimality report")
    p.add_argument("input", type=Path)
    p.set_defaults(handler=bounds_report)

    p = commands.add_parser("simulate", parents=[common], help="run a pool simulation")
    p.add_argument("config", type=Path)
    p.add_argument("--seed", type=int)
    p.add_argument("--loads", action="store_true", help="append per-user load records")
    p.set_defaults(handler=simulate)

    p = commands.add_parser("table", parents=[common], help="convert .wam <-> .wat")
    p.add_argument("input", type=Path)
    p.add_argument("out", type=Path)
    p.set_defaults(handler=table)

    p = commands.add_parser("search", parents=[common], help="empirical sparsest-matrix search")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=search)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return ExitCode.USAGE if e.code else ExitCode.OK

    if args.verbose:
        set_level(logging.DEBUG)
    logger.debug(f"Running {args.command}")

    try:
        return args.handler(args)
    except (WalshError, OSError) as e:
        location = getattr(args, "input", None) or getattr(args, "config", None)
        prefix = f"{location}: " if location else ""
        print_styled(f"error: {prefix}{e}", bcolors.FAIL)
        return ExitCode.USAGE


def start():
    sys.exit(main())


if __name__ == "__main__":
    start()
