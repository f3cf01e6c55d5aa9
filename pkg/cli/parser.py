"""Argument parsing for the ``mincut-lab`` command line."""

import argparse

from config import DEFAULT_WORKERS
from core.errors import UsageError
from core.generators import GENERATOR_KINDS
from services.algorithms import ALGORITHMS
from services.montecarlo import BENCH_FAMILIES, EVENTS

ALGORITHM_CHOICES = list(ALGORITHMS) + ["oracle"]


class LabArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of exiting, so the caller owns exit codes."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> LabArgumentParser:
    common = LabArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None, help="64-bit seed; drawn at random and printed if omitted")

    parser = LabArgumentParser(prog="mincut-lab", description="Randomized minimum cut experiments")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=LabArgumentParser)

    gen = commands.add_parser("gen", parents=[common], help="write a generated graph")
    gen.add_argument("kind", choices=GENERATOR_KINDS)
    gen.add_argument("operands", nargs="+", metavar="N ... OUT", help="n (two cluster sizes for planted), then the output file")
    gen.add_argument("--intra", type=int, default=10)
    gen.add_argument("--inter", type=int, default=1)
    gen.add_argument("--crossing", type=int, default=1)
    gen.add_argument("--p", type=float, default=0.5, help="edge probability for random graphs")
    gen.add_argument("--cap-min", type=int, default=1)
    gen.add_argument("--cap-max", type=int, default=1)

    mincut = commands.add_parser("mincut", parents=[common], help="solve one graph file")
    mincut.add_argument("path")
    mincut.add_argument("--algorithm", choices=ALGORITHM_CHOICES, default="fpz1")
    mincut.add_argument("--repetitions", type=int, default=1)

    estimate = commands.add_parser("estimate", parents=[common], help="estimate a success probability")
    estimate.add_argument("graph", help="graph file, or a generator spec such as cycle:16")
    estimate.add_argument("--algorithm", choices=list(ALGORITHMS), default="fpz1")
    estimate.add_argument("--event", choices=EVENTS, default="survival")
    estimate.add_argument("--trials", type=int, default=10_000)
    estimate.add_argument("--repetitions", type=int, default=1)
    estimate.add_argument("--target", type=_int_list, default=None, help="comma-separated side of the tracked cut")
    estimate.add_argument("--threads", type=int, default=DEFAULT_WORKERS, help="worker processes")
    estimate.add_argument("--record", action="store_true", help="store the result in the results database")

    analyze = commands.add_parser("analyze", help="print the survival probability tables")
    analyze.add_argument("N", type=int)
    analyze.add_argument("--check", action="store_true", help="also check the Θ(1/log n) bounds")

    bench = commands.add_parser("bench", parents=[common], help="time algorithms against n² ln n")
    bench.add_argument("sizes", nargs="*", type=int)
    bench.add_argument("--algorithm", choices=list(ALGORITHMS), action="append", dest="algorithms")
    bench.add_argument("--reps", type=int, default=5)
    bench.add_argument("--family", choices=BENCH_FAMILIES, default="dense")
    bench.add_argument("--record", action="store_true", help="store the records in the results database")

    history = commands.add_parser("history", help="print stored results")
    history.add_argument("--algorithm", choices=list(ALGORITHMS), default=None)
    history.add_argument("--limit", type=int, default=50)
    history.add_argument("--days", type=int, default=7, help="window of the --stats summary")
    shown = history.add_mutually_exclusive_group()
    shown.add_argument("--bench", action="store_true", help="print stored bench records instead of estimates")
    shown.add_argument("--stats", action="store_true", help="summarize sessions and results of the last --days days")
    shown.add_argument("--session", type=int, default=None, metavar="ID", help="print one experiment session")

    return parser


def parse_args(parser: LabArgumentParser, argv: list[str] | None = None) -> argparse.Namespace:
    """Parse argv, letting ``gen`` and ``bench`` take positionals after options.

    argparse stops filling positionals at the first option, so for
    ``gen planted 4 4 --intra 10 out.g`` the trailing path arrives as an
    extra argument.
    """
    args, extras = parser.parse_known_args(argv)
    if not extras:
        return args
    if any(e.startswith("-") for e in extras):
        parser.error(f"unrecognized arguments: {' '.join(extras)}")
    if args.command == "gen":
        args.operands += extras
    elif args.command == "bench":
        try:
            args.sizes += [int(e) for e in extras]
        except ValueError:
            parser.error(f"bench sizes must be integers, got {' '.join(extras)}")
    else:
        parser.error(f"unrecognized arguments: {' '.join(extras)}")
    return args
