import logging
from datetime import datetime, timedelta, timezone

from database.db import get_db

logger = logging.getLogger(__name__)

_ESTIMATE_FIELDS = (
    "graph", "algorithm", "event", "n", "trials", "successes",
    "point", "ci_low", "ci_high", "analytic_reference",
)
_BENCH_FIELDS = (
    "n", "algorithm", "family", "repetitions", "mean_seconds",
    "ratio_n2logn", "mean_contractions", "mean_calls", "seconds_per_call", "calibrated_ratio",
)


# ─── Sessions ───────────────────────────────────────────────────────────────

async def create_session(command: str, seed: int) -> int:
    """Open an experiment session. Returns its ID."""
    db = await get_db()
    # seeds are 64-bit unsigned and overflow SQLite's INTEGER
    cursor = await db.execute(
        "INSERT INTO experiment_sessions (command, seed, status) VALUES (?, ?, 'running')",
        (command, str(seed)),
    )
    await db.commit()
    return cursor.lastrowid


async def update_session(session_id: int, **kwargs) -> None:
    """Update session fields dynamically."""
    if not kwargs:
        return
    if kwargs.get("status") in ("finished", "failed"):
        kwargs.setdefault("finished_at", datetime.now(timezone.utc).isoformat())
    set_clause = ", ".join(f"{k} = ?" for k in kwargs)
    values = list(kwargs.values()) + [session_id]
    db = await get_db()
    await db.execute(f"UPDATE experiment_sessions SET {set_clause} WHERE id = ?", values)
    await db.commit()


async def get_session(session_id: int) -> dict | None:
    db = await get_db()
    cursor = await db.execute("SELECT * FROM experiment_sessions WHERE id = ?", (session_id,))
    row = await cursor.fetchone()
    return dict(row) if row else None


# ─── Results ────────────────────────────────────────────────────────────────

async def record_estimate(session_id: int, row: dict) -> int:
    """Store one estimates-CSV row. Returns the record ID."""
    db = await get_db()
    columns = ", ".join(("session_id",) + _ESTIMATE_FIELDS)
    placeholders = ", ".join("?" for _ in range(len(_ESTIMATE_FIELDS) + 1))
    cursor = await db.execute(
        f"INSERT INTO estimates ({columns}) VALUES ({placeholders})",
        [session_id] + [row.get(f) for f in _ESTIMATE_FIELDS],
    )
    await db.commit()
    return cursor.lastrowid


async def record_bench(session_id: int, row: dict) -> int:
    """Store one bench-CSV row. Returns the record ID."""
    db = await get_db()
    columns = ", ".join(("session_id",) + _BENCH_FIELDS)
    placeholders = ", ".join("?" for _ in range(len(_BENCH_FIELDS) + 1))
    cursor = await db.execute(
        f"INSERT INTO bench_records ({columns}) VALUES ({placeholders})",
        [session_id] + [row.get(f) for f in _BENCH_FIELDS],
    )
    await db.commit()
    return cursor.lastrowid


async def get_estimates(algorithm: str | None = None, limit: int = 100) -> list[dict]:
    """Most recent estimates first, optionally for one algorithm."""
    db = await get_db()
    if algorithm is None:
        cursor = await db.execute("SELECT * FROM estimates ORDER BY id DESC LIMIT ?", (limit,))
    else:
        cursor = await db.execute(
            "SELECT * FROM estimates WHERE algorithm = ? ORDER BY id DESC LIMIT ?",
            (algorithm, limit),
        )
    rows = await cursor.fetchall()
    return [dict(r) for r in rows]


async def get_bench_records(algorithm: str | None = None) -> list[dict]:
    db = await get_db()
    if algorithm is None:
        cursor = await db.execute("SELECT * FROM bench_records ORDER BY algorithm, n")
    else:
        cursor = await db.execute(
            "SELECT * FROM bench_records WHERE algorithm = ? ORDER BY n", (algorithm,)
        )
    rows = await cursor.fetchall()
    return [dict(r) for r in rows]


# ─── Statistics ─────────────────────────────────────────────────────────────

async def get_stats(days: int = 7) -> dict:
    """Counts of sessions and stored results over the last N days."""
    db = await get_db()
    since = (datetime.now(timezone.utc) - timedelta(days=days)).strftime("%Y-%m-%d %H:%M:%S")

    stats = {}
    for status in ("running", "finished", "failed"):
        cursor = await db.execute(
            "SELECT COUNT(*) FROM experiment_sessions WHERE status = ? AND started_at >= ?",
            (status, since),
        )
        row = await cursor.fetchone()
        stats[status] = row[0]

    cursor = await db.execute("SELECT COUNT(*) FROM estimates WHERE created_at >= ?", (since,))
    row = await cursor.fetchone()
    stats["estimates"] = row[0]

    cursor = await db.execute("SELECT COUNT(*) FROM bench_records WHERE created_at >= ?", (since,))
    row = await cursor.fetchone()
    stats["bench_records"] = row[0]

    cursor = await db.execute(
        """
        SELECT algorithm, SUM(trials) as total
        FROM estimates
        WHERE created_at >= ?
        GROUP BY algorithm
        ORDER BY total DESC
        """,
        (since,),
    )
    rows = await cursor.fetchall()
    stats["trials_by_algorithm"] = [(r[0], r[1]) for r in rows]

    cursor = await db.execute("SELECT * FROM experiment_sessions ORDER BY id DESC LIMIT 1")
    row = await cursor.fetchone()
    stats["last_session"] = dict(row) if row else None

    return stats
