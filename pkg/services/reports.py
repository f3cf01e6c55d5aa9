"""CSV schemas for estimates, bench records and analysis tables.

Floats are written with ``repr`` so every file parses back to the same
values. Empty cells stand for "no value".
"""

from __future__ import annotations

import csv
import io

from services.montecarlo import BenchRecord, SuccessEstimate

ESTIMATE_COLUMNS = [
    "graph", "algorithm", "event", "n", "trials", "point", "ci_low", "ci_high",
    "analytic_reference", "successes",
]
BENCH_COLUMNS = [
    "n", "algorithm", "mean_seconds", "ratio_n2logn",
    "family", "repetitions", "mean_contractions", "mean_calls", "seconds_per_call", "calibrated_ratio",
]
ANALYSIS_COLUMNS = ["n", "Q_fpz", "Q_opt", "1/(2Hn-2)", "Hn", "Q_opt_policy"]

_INT_COLUMNS = {"n", "trials", "successes", "repetitions"}
_TEXT_COLUMNS = {"graph", "algorithm", "event", "family"}


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(column: str, text: str):
    if column in _TEXT_COLUMNS:
        return text
    if text == "":
        return None
    if column in _INT_COLUMNS:
        return int(text)
    return float(text)


def estimate_row(graph: str, algorithm: str, n: int, estimate: SuccessEstimate, reference: float | None) -> dict:
    return {
        "graph": graph,
        "algorithm": algorithm,
        "event": estimate.event,
        "n": n,
        "trials": estimate.trials,
        "point": estimate.point,
        "ci_low": estimate.ci_low,
        "ci_high": estimate.ci_high,
        "analytic_reference": reference,
        "successes": estimate.successes,
    }


def bench_row(record: BenchRecord) -> dict:
    return {
        "n": record.n,
        "algorithm": record.algorithm,
        "mean_seconds": record.mean_seconds,
        "ratio_n2logn": record.ratio,
        "family": record.family,
        "repetitions": record.repetitions,
        "mean_contractions": record.mean_contractions,
        "mean_calls": record.mean_calls,
        "seconds_per_call": record.seconds_per_call,
        "calibrated_ratio": record.calibrated_ratio,
    }


def write_csv(rows: list[dict], columns: list[str], stream=None) -> str:
    """Write rows (header first) to ``stream`` and return the text."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _cell(row.get(c)) for c in columns})
    text = buffer.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def read_csv(text: str) -> list[dict]:
    """Parse a CSV written by ``write_csv`` back into typed rows."""
    reader = csv.DictReader(io.StringIO(text))
    return [{c: _parse_cell(c, v) for c, v in row.items()} for row in reader]
