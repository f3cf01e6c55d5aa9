"""Min-Cut Lab — entry point.

Batch command line for generating graphs, solving them with the
randomized contraction algorithms, estimating success probabilities,
printing the analytic tables and benchmarking runtimes.
"""

import logging
import sys

from cli.handlers import register_handlers, run
from cli.parser import build_parser, parse_args
from config import LOG_LEVEL
from core.errors import UsageError

logger = logging.getLogger(__name__)


def configure_logging(verbose: bool = False) -> None:
    # stdout carries CSV; logs go to stderr
    logging.basicConfig(
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        level=logging.DEBUG if verbose else LOG_LEVEL,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


def main(argv: list[str] | None = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    register_handlers(parser)
    try:
        args = parse_args(parser, argv)
    except UsageError as e:
        configure_logging()
        logger.error(str(e))
        return 2

    configure_logging(args.verbose)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
