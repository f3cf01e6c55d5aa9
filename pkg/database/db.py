import logging

import aiosqlite

from config import DATABASE_PATH

logger = logging.getLogger(__name__)

_db_connection: aiosqlite.Connection | None = None


async def get_db(path: str | None = None) -> aiosqlite.Connection:
    """Shared results-store connection, opened on first use."""
    global _db_connection
    if _db_connection is None:
        _db_connection = await aiosqlite.connect(path or DATABASE_PATH)
        _db_connection.row_factory = aiosqlite.Row
        await _db_connection.execute("PRAGMA foreign_keys=ON")
    return _db_connection


async def init_database(path: str | None = None):
    """Create the results tables if they don't exist."""
    db = await get_db(path)

    await db.execute("""
        CREATE TABLE IF NOT EXISTS experiment_sessions (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            command TEXT NOT NULL,
            seed TEXT NOT NULL,
            status TEXT DEFAULT 'running',
            started_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
            finished_at TIMESTAMP
        )
    """)

    await db.execute("""
        CREATE TABLE IF NOT EXISTS estimates (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            session_id INTEGER NOT NULL,
            graph TEXT NOT NULL,
            algorithm TEXT NOT NULL,
            event TEXT NOT NULL,
            n INTEGER NOT NULL,
            trials INTEGER NOT NULL,
            successes INTEGER NOT NULL,
            point REAL NOT NULL,
            ci_low REAL NOT NULL,
            ci_high REAL NOT NULL,
            analytic_reference REAL,
            created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
            FOREIGN KEY (session_id) REFERENCES experiment_sessions(id)
        )
    """)

    await db.execute("""
        CREATE TABLE IF NOT EXISTS bench_records (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            session_id INTEGER NOT NULL,
            n INTEGER NOT NULL,
            algorithm TEXT NOT NULL,
            family TEXT NOT NULL,
            repetitions INTEGER NOT NULL,
            mean_seconds REAL NOT NULL,
            ratio_n2logn REAL NOT NULL,
            mean_contractions REAL NOT NULL,
            mean_calls REAL NOT NULL,
            seconds_per_call REAL,
            calibrated_ratio REAL,
            created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
            FOREIGN KEY (session_id) REFERENCES experiment_sessions(id)
        )
    """)

    await db.execute("""
        CREATE INDEX IF NOT EXISTS idx_estimates_algorithm
        ON estimates(algorithm, event)
    """)
    await db.execute("""
        CREATE INDEX IF NOT EXISTS idx_bench_algorithm
        ON bench_records(algorithm, n)
    """)

    await db.commit()
    logger.info("Results store initialized")


async def close_database():
    global _db_connection
    if _db_connection is not None:
        await _db_connection.close()
        _db_connection = None
        logger.debug("Results store connection closed")
