"""Sample graphs for exercising Min-Cut Lab without generated inputs.

The test modules import the texts and builders below. Run this file to
push every sample through parsing, the oracle and one randomized
algorithm, and to round-trip a results-store session:
    python test_data.py
"""

import asyncio
import json
import logging
import os
import tempfile

logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=logging.INFO,
)
logger = logging.getLogger(__name__)


# ─── Graph texts ────────────────────────────────────────────────────────────

PATH_3 = """\
# path a - b - c
3 2
0 1 1
1 2 1
"""

K4 = """\
4 6
0 1 1
0 2 1
0 3 1
1 2 1
1 3 1
2 3 1
"""

C5 = """\
5 5
0 1 1
1 2 1
2 3 1
3 4 1
0 4 1
"""

# two triangles of capacity 10 joined by one unit edge; planted cut {0, 1, 2}
PLANTED_6 = """\
6 7
0 1 10
0 2 10
1 2 10
3 4 10
3 5 10
4 5 10
2 3 1
"""

DISCONNECTED_4 = """\
4 2
0 1 1
2 3 1
"""

# (text, offending line, reason fragment)
MALFORMED = [
    ("3\n0 1 1\n", 1, "malformed header"),
    ("3 1\n0 1\n", 2, "malformed edge"),
    ("3 1\n0 5 1\n", 2, "out of range"),
    ("3 1\n1 1 1\n", 2, "self-loop"),
    ("3 1\n2 1 1\n", 2, "u < v"),
    ("3 1\n0 1 -4\n", 2, "negative capacity"),
    ("3 1\n0 1 1\n1 2 1\n", 3, "wrong edge count"),
    ("3 2\n0 1 1\n", 3, "wrong edge count"),
    ("3 1\n0 x 1\n", 2, "malformed edge"),
]

SAMPLES = {
    "path3": (PATH_3, 1),
    "k4": (K4, 3),
    "c5": (C5, 2),
    "planted6": (PLANTED_6, 1),
}


# ─── Builders ───────────────────────────────────────────────────────────────

def sample_graph(name: str):
    from core.graph_io import parse_graph

    return parse_graph(SAMPLES[name][0])


def random_instances(count: int, n_low: int, n_high: int, seed: int = 0, cap_max: int = 5):
    """``count`` connected random graphs with n drawn from [n_low, n_high]."""
    from core.generators import random_graph
    from core.random_source import RandomSource

    rng = RandomSource(seed)
    graphs = []
    for i in range(count):
        n = rng.integer(n_low, n_high + 1)
        p = 0.3 + 0.6 * rng.uniform()
        graphs.append(random_graph(n, p=p, cap_max=cap_max, rng=rng.for_trial(i)))
    return graphs


# ─── Smoke runner ───────────────────────────────────────────────────────────

def smoke_samples():
    from core.graph_io import parse_graph, serialize_graph
    from core.random_source import RandomSource
    from services.algorithms import run_algorithm
    from services.oracle import brute_force_min_cut, deterministic_min_cut

    logger.info("--- Sample graphs ---")
    for name, (text, expected) in SAMPLES.items():
        g = sample_graph(name)
        brute = brute_force_min_cut(g)
        sw = deterministic_min_cut(g)
        found = run_algorithm("fpz1", g, RandomSource(1), repetitions=30)
        logger.info(
            f"  {name}: brute={brute.value} stoer-wagner={sw.value} fpz1={found.value} "
            f"side={brute.sorted_side()}"
        )
        assert brute.value == sw.value == found.value == expected
        assert parse_graph(serialize_graph(g)).original_edges() == g.original_edges()
    logger.info("--- Sample graphs complete ---\n")


async def smoke_results_store(path: str):
    from database import models
    from database.db import close_database, init_database

    logger.info("--- Results store ---")
    await init_database(path)
    session_id = await models.create_session("estimate", 2**64 - 1)
    await models.record_estimate(session_id, {
        "graph": "cycle:16", "algorithm": "fpz1", "event": "survival", "n": 16,
        "trials": 1000, "successes": 210, "point": 0.210, "ci_low": 0.171,
        "ci_high": 0.249, "analytic_reference": 0.21002,
    })
    await models.update_session(session_id, status="finished")
    stats = await models.get_stats(days=1)
    logger.info(f"Stats: {json.dumps(stats, indent=2, default=str)}")
    await close_database()
    logger.info("--- Results store complete ---\n")


def run_all_smoke_checks():
    logger.info("=" * 50)
    logger.info("MIN-CUT LAB — SMOKE CHECKS")
    logger.info("=" * 50 + "\n")

    smoke_samples()
    with tempfile.TemporaryDirectory() as tmp:
        asyncio.run(smoke_results_store(os.path.join(tmp, "smoke.db")))

    logger.info("=" * 50)
    logger.info("ALL SMOKE CHECKS PASSED")
    logger.info("=" * 50)


if __name__ == "__main__":
    run_all_smoke_checks()
