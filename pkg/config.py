import os
from dotenv import load_dotenv

load_dotenv()


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(f"MINCUT_{name}", "").strip()
    return int(raw) if raw else default


def _float_env(name: str, default: float) -> float:
    raw = os.getenv(f"MINCUT_{name}", "").strip()
    return float(raw) if raw else default


# Graph representation
DENSE_MATRIX_LIMIT = _int_env("DENSE_MATRIX_LIMIT", 4096)   # Max vertices for the dense capacity matrix
RANDOM_GRAPH_RETRIES = _int_env("RANDOM_GRAPH_RETRIES", 100)  # Attempts to draw a connected random graph

# Algorithms
FPZ_REPEAT_CAP = _int_env("FPZ_REPEAT_CAP", 10_000)        # Same-size repeats before the second formulation gives up
KARGER_STEIN_BASE_SIZE = _int_env("KARGER_STEIN_BASE_SIZE", 6)

# Oracle
BRUTE_FORCE_MAX_N = _int_env("BRUTE_FORCE_MAX_N", 24)
ENUMERATION_CHUNK = _int_env("ENUMERATION_CHUNK", 1 << 14)  # Sides evaluated per vectorised block

# Monte Carlo
CONFIDENCE_SIGMAS = _float_env("CONFIDENCE_SIGMAS", 3.0)
BENCH_WARMUP_FRACTION = _float_env("BENCH_WARMUP_FRACTION", 0.05)
DEFAULT_WORKERS = _int_env("DEFAULT_WORKERS", 1)

# Results store
DATABASE_PATH = os.getenv("MINCUT_DATABASE_PATH", "mincut_lab.db")

# Logging
LOG_LEVEL = os.getenv("MINCUT_LOG_LEVEL", "INFO").upper()
