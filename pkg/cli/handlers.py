"""Subcommand handlers for the ``mincut-lab`` command line.

Handlers write results to stdout and raise on failure; ``run`` maps
exceptions onto exit codes.
"""

import asyncio
import logging
import os
import re
import sys
import time

from core.errors import (
    EstimateError,
    GraphError,
    GraphParseError,
    MinCutError,
    UsageError,
)
from core.generators import GENERATOR_KINDS, generate
from core.graph import ContractibleGraph, Cut
from core.graph_io import read_graph_file, write_graph_file
from core.random_source import RandomSource
from database import models
from database.db import close_database, init_database
from services.algorithms import RunStats, run_algorithm
from services.analysis import analysis_rows, theta_bounds_check
from services.montecarlo import analytic_reference, bench_runtime, estimate_success
from services.oracle import deterministic_min_cut
from services.reports import (
    ANALYSIS_COLUMNS,
    BENCH_COLUMNS,
    ESTIMATE_COLUMNS,
    bench_row,
    estimate_row,
    write_csv,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INVALID_GRAPH = 3

_GENERATOR_SPEC = re.compile(rf"^({'|'.join(GENERATOR_KINDS)}):(\d+)$")


# ─── Helpers ────────────────────────────────────────────────────────────────

def _resolve_seed(args) -> int:
    """The --seed value, or a fresh one printed for replay."""
    if getattr(args, "seed", None) is not None:
        return args.seed
    seed = RandomSource.fresh_seed()
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _load_graph(spec: str, seed: int) -> ContractibleGraph:
    """A graph file, or ``kind:n`` for a generated graph."""
    match = _GENERATOR_SPEC.match(spec)
    if match and not os.path.exists(spec):
        return generate(match.group(1), int(match.group(2)), seed=seed).graph
    return read_graph_file(spec)


async def _record(command: str, seed: int, estimates=(), bench=()) -> int:
    await init_database()
    try:
        session_id = await models.create_session(command, seed)
        for row in estimates:
            await models.record_estimate(session_id, row)
        for row in bench:
            await models.record_bench(session_id, row)
        await models.update_session(session_id, status="finished")
        logger.info(f"Recorded session {session_id}: {len(estimates)} estimates, {len(bench)} bench records")
        return session_id
    finally:
        await close_database()


# ─── Commands ───────────────────────────────────────────────────────────────

def cmd_gen(args) -> int:
    """Write a generated graph; print the planted cut value for planted graphs."""
    if len(args.operands) < 2:
        raise UsageError("gen needs a size and an output path")
    *sizes, out = args.operands
    try:
        sizes = [int(s) for s in sizes]
    except ValueError:
        raise UsageError(f"sizes must be integers, got {' '.join(sizes)}") from None
    seed = _resolve_seed(args)

    if args.kind == "planted":
        if len(sizes) != 2:
            raise UsageError("planted graphs take two cluster sizes")
        params = {"sizes": tuple(sizes), "intra": args.intra, "inter": args.inter, "crossing": args.crossing}
    else:
        if len(sizes) != 1:
            raise UsageError(f"{args.kind} graphs take one size")
        params = {"p": args.p, "cap_min": args.cap_min, "cap_max": args.cap_max} if args.kind == "random" else {}

    try:
        generated = generate(args.kind, sum(sizes), seed=seed, **params)
    except GraphError as e:
        raise UsageError(f"invalid generator parameters: {e}") from e
    write_graph_file(generated.graph, out)
    if generated.planted_cut is not None:
        print(f"planted cut value: {generated.planted_cut.value}")
    return EXIT_OK


def cmd_mincut(args) -> int:
    """Solve one graph and report value, side, work and wall time."""
    if args.repetitions < 1:
        raise UsageError(f"repetitions must be at least 1, got {args.repetitions}")
    g = read_graph_file(args.path)
    stats = RunStats()
    started = time.perf_counter()
    if args.algorithm == "oracle":
        cut = deterministic_min_cut(g)
    else:
        seed = _resolve_seed(args)
        cut = run_algorithm(args.algorithm, g, RandomSource(seed), stats, repetitions=args.repetitions)
    elapsed = time.perf_counter() - started

    print(f"value: {cut.value}")
    print(f"side: {' '.join(str(v) for v in cut.sorted_side())}")
    print(f"contractions: {stats.contractions}")
    print(f"recursive calls: {stats.recursive_calls}")
    print(f"seconds: {elapsed:.6f}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    """One estimates-CSV row for the requested event."""
    if args.trials < 1:
        raise UsageError(f"trials must be at least 1, got {args.trials}")
    if args.threads < 1:
        raise UsageError(f"threads must be at least 1, got {args.threads}")
    seed = _resolve_seed(args)
    g = _load_graph(args.graph, seed)
    target = None
    if args.target is not None:
        target = Cut(frozenset(args.target), 0, g.n_original)

    estimate = estimate_success(
        args.algorithm, g, target, args.event, args.trials, seed,
        workers=args.threads, repetitions=args.repetitions,
    )
    reference = analytic_reference(args.algorithm, g.n_original, args.repetitions)
    row = estimate_row(args.graph, args.algorithm, g.n_original, estimate, reference)
    write_csv([row], ESTIMATE_COLUMNS, sys.stdout)
    if args.record:
        asyncio.run(_record("estimate", seed, estimates=[row]))
    return EXIT_OK


def cmd_analyze(args) -> int:
    """Survival probability tables for n = 2..N."""
    if args.N < 2:
        raise UsageError(f"N must be at least 2, got {args.N}")
    if args.check and args.N < 4:
        raise UsageError(f"--check needs N >= 4, got {args.N}")
    write_csv(analysis_rows(args.N), ANALYSIS_COLUMNS, sys.stdout)
    if args.check:
        report = theta_bounds_check(args.N)
        logger.info(
            f"Halving and step bounds hold to N={args.N}; "
            f"window within [1/2, 4]: {report.window_within_bounds}"
        )
        if not report.window_within_bounds:
            return EXIT_FAILURE
    return EXIT_OK


def cmd_bench(args) -> int:
    """Bench CSV over the requested algorithms and sizes."""
    if not args.sizes:
        raise UsageError("bench needs at least one size")
    if any(n < 3 for n in args.sizes):
        raise UsageError("bench sizes must be at least 3")
    seed = _resolve_seed(args)
    rows = []
    for tag in args.algorithms or ["fpz2", "optimal"]:
        records = bench_runtime(tag, args.sizes, args.reps, seed, family=args.family)
        rows.extend(bench_row(r) for r in records)
    write_csv(rows, BENCH_COLUMNS, sys.stdout)
    if args.record:
        asyncio.run(_record("bench", seed, bench=rows))
    return EXIT_OK


def _print_stats(stats: dict, days: int) -> None:
    print(f"last {days} days:")
    print(f"  sessions: {stats['finished']} finished, {stats['running']} running, {stats['failed']} failed")
    print(f"  estimates: {stats['estimates']}")
    print(f"  bench records: {stats['bench_records']}")
    for algorithm, trials in stats["trials_by_algorithm"]:
        print(f"  trials of {algorithm}: {trials}")
    session = stats["last_session"]
    if session:
        print(f"last session: #{session['id']} {session['command']} seed {session['seed']} ({session['status']})")


def cmd_history(args) -> int:
    """Stored estimates, most recent first; bench records, a summary or one session on request."""
    if args.limit < 1:
        raise UsageError(f"limit must be at least 1, got {args.limit}")
    if args.days < 1:
        raise UsageError(f"days must be at least 1, got {args.days}")

    async def fetch():
        await init_database()
        try:
            if args.bench:
                return await models.get_bench_records(args.algorithm)
            if args.stats:
                return await models.get_stats(days=args.days)
            if args.session is not None:
                return await models.get_session(args.session)
            return await models.get_estimates(args.algorithm, args.limit)
        finally:
            await close_database()

    result = asyncio.run(fetch())
    if args.bench:
        write_csv(result, BENCH_COLUMNS, sys.stdout)
    elif args.stats:
        _print_stats(result, args.days)
    elif args.session is not None:
        if result is None:
            raise UsageError(f"no session with id {args.session}")
        for key, value in result.items():
            print(f"{key}: {value}")
    else:
        write_csv(result, ESTIMATE_COLUMNS, sys.stdout)
    return EXIT_OK


# ─── Dispatch ───────────────────────────────────────────────────────────────

def register_handlers(parser) -> None:
    """Bind each subcommand to its handler."""
    commands = {
        "gen": cmd_gen,
        "mincut": cmd_mincut,
        "estimate": cmd_estimate,
        "analyze": cmd_analyze,
        "bench": cmd_bench,
        "history": cmd_history,
    }
    subparsers = next(a for a in parser._actions if a.dest == "command")
    for name, handler in commands.items():
        subparsers.choices[name].set_defaults(handler=handler)


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, (GraphParseError, UsageError, EstimateError)):
        return EXIT_USAGE
    if isinstance(error, GraphError):
        return EXIT_INVALID_GRAPH
    return EXIT_FAILURE


def run(args) -> int:
    """Run the bound handler and translate failures into exit codes."""
    try:
        return args.handler(args)
    except (MinCutError, OSError) as e:
        code = exit_code_for(e)
        logger.error(f"{args.command} failed: {e}")
        return code
