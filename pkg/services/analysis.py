"""Analytic survival probabilities of the recursive contraction algorithms.

Q(n) is the probability that a fixed minimum cut reaches a leaf when
every contraction at size k keeps it with probability exactly p_k.
Tables are float64 arrays indexed so that ``q[n]`` is Q(n); entries 0
and 1 are NaN.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from core.errors import GraphError, RecurrenceError
from core.graph import ContractibleGraph
from services.branching import BranchingPolicy, p_n
from services.oracle import min_cut_value

logger = logging.getLogger(__name__)

FIXED_POINT_TOLERANCE = 1e-12


@dataclass
class RecurrenceTable:
    tag: str
    q: np.ndarray
    max_residual: float = 0.0

    @property
    def n_max(self) -> int:
        return len(self.q) - 1

    @property
    def s(self) -> np.ndarray:
        """S(n) = 1/Q(n)."""
        return 1.0 / self.q

    def at(self, n: int) -> float:
        if not 2 <= n <= self.n_max:
            raise IndexError(f"table covers n = 2..{self.n_max}, asked for {n}")
        return float(self.q[n])

    def values(self) -> np.ndarray:
        """Q(2..N) without the padding."""
        return self.q[2:]


def _empty_table(N: int) -> np.ndarray:
    if N < 2:
        raise GraphError(f"recurrence tables need N >= 2, got {N}")
    q = np.full(N + 1, np.nan)
    q[2] = 1.0
    return q


def harmonic(n: int) -> float:
    """H_n = 1 + 1/2 + ... + 1/n, summed smallest term first."""
    if n < 1:
        raise GraphError(f"harmonic number needs n >= 1, got {n}")
    return math.fsum(1.0 / k for k in range(n, 0, -1))


def harmonic_table(N: int) -> np.ndarray:
    """H_0..H_N (H_0 = 0)."""
    h = np.zeros(N + 1)
    h[1:] = np.cumsum(1.0 / np.arange(1, N + 1))
    return h


def q_fpz_closed(n: int) -> float:
    """1 / (2 H_n - 2)."""
    if n < 2:
        raise GraphError(f"closed form needs n >= 2 (2H_1 - 2 = 0), got {n}")
    return 1.0 / (2.0 * harmonic(n) - 2.0)


def q_fpz_recurrence(N: int) -> RecurrenceTable:
    """1/Q(n) = 1/Q(n-1) + 2/n from Q(2) = 1, checked against the implicit
    fixed-point equation it was solved from."""
    q = _empty_table(N)
    if N > 2:
        n = np.arange(3, N + 1)
        q[3:] = 1.0 / (1.0 + np.cumsum(2.0 / n))

        p = 1.0 - 2.0 / n
        prev, cur = q[2:-1], q[3:]
        implied = p**2 * prev + (1 - p) * (1 - (1 - cur) * (1 - p * prev))
        residual = float(np.max(np.abs(cur - implied)))
        if residual >= FIXED_POINT_TOLERANCE:
            raise RecurrenceError(f"fixed-point residual {residual:.3e} exceeds {FIXED_POINT_TOLERANCE}")
    else:
        residual = 0.0
    return RecurrenceTable("fpz", q, residual)


def q_optimal_recurrence(N: int) -> RecurrenceTable:
    """Q(n) = Q(n-1) - (2(n-2)/n²) Q(n-1)², Q(2) = 1."""
    q = _empty_table(N)
    prev = 1.0
    for n in range(3, N + 1):
        prev = prev - (2.0 * (n - 2) / (n * n)) * prev * prev
        q[n] = prev
    return RecurrenceTable("optimal", q)


def q_policy_recurrence(policy: BranchingPolicy, N: int, k_max: int = 256) -> RecurrenceTable:
    """Exact survival probability of any branching policy.

    Q(n) = Σ_k a_k (1 - f^k) with f = 1 - p_n Q(n-1): each of k children
    independently keeps the cut with probability p_n and then finds it
    with probability Q(n-1). The geometric sum has a closed form.
    """
    q = _empty_table(N)
    prev = 1.0
    for n in range(3, N + 1):
        p = p_n(n)
        f = 1.0 - p * prev
        if policy.kind == "geometric":
            # Σ p(1-p)^(k-1) f^k = p f / (1 - (1-p) f)
            failure = p * f / (1.0 - (1.0 - p) * f)
        else:
            failure = sum(a * f**k for k, a in policy.offspring_distribution(n, k_max).items())
        prev = 1.0 - failure
        q[n] = prev
    return RecurrenceTable(f"policy:{policy.kind}", q)


def karger_single_run_bound(n: int) -> float:
    """1 / C(n, 2)."""
    if n < 2:
        raise GraphError(f"bound needs n >= 2, got {n}")
    return 1.0 / math.comb(n, 2)


def survival_product(n: int) -> float:
    """Π_{k=3..n} p_k, the single-run survival probability on a unit cycle."""
    return math.prod(p_n(k) for k in range(3, n + 1))


@dataclass
class ThetaReport:
    n_max: int
    halving_ok: bool
    step_ok: bool
    window_low: float | None = None
    window_high: float | None = None
    window_drift: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def window_within_bounds(self) -> bool:
        if self.window_low is None:
            return True
        return 0.5 <= self.window_low and self.window_high <= 4.0


def theta_bounds_check(N: int, table: RecurrenceTable | None = None) -> ThetaReport:
    """Check the Θ(1/log n) bounds of the tuned variant's recurrence.

    Hard requirements (raise on violation): Q(n-1) >= Q(n) >= Q(n-1)/2 for
    n >= 3 and S(n) - S(n-1) >= 1/n for n >= 4. Reported: the window of S(n)/H_n
    over 100 <= n <= N and how far it drifts.
    """
    if N < 4:
        raise GraphError(f"theta bounds check needs N >= 4, got {N}")
    table = table or q_optimal_recurrence(N)
    q, s = table.q, table.s

    n = np.arange(3, N + 1)
    prev, cur = q[2:N], q[3 : N + 1]
    halving = (cur <= prev) & (cur >= prev / 2)
    if not np.all(halving):
        bad = int(n[~halving][0])
        raise RecurrenceError(f"halving claim Q(n-1) >= Q(n) >= Q(n-1)/2 fails at n = {bad}")

    n = np.arange(4, N + 1)
    steps = s[4 : N + 1] - s[3:N]
    if not np.all(steps >= 1.0 / n):
        bad = int(n[steps < 1.0 / n][0])
        raise RecurrenceError(f"step bound S(n) - S(n-1) >= 1/n fails at n = {bad}")

    report = ThetaReport(N, halving_ok=True, step_ok=True)
    if N >= 100:
        h = harmonic_table(N)
        ratio = s[100 : N + 1] / h[100 : N + 1]
        report.window_low = float(ratio.min())
        report.window_high = float(ratio.max())
        report.window_drift = float(ratio[-1] - ratio[0])
    else:
        report.notes.append("N < 100: no asymptotic window")

    fpz = q_fpz_recurrence(N).q
    below = np.flatnonzero(table.q[2:] < fpz[2:])
    if len(below):
        report.notes.append(f"observed: Q_opt < Q_fpz first at n = {int(below[0]) + 2}")
    else:
        report.notes.append(f"observed: Q_opt >= Q_fpz for every n <= {N}")
    logger.info(
        f"Theta check to N={N}: window S(n)/H_n = [{report.window_low}, {report.window_high}], "
        f"drift {report.window_drift}"
    )
    return report


def survival_prob_lower_bound(g: ContractibleGraph, lambda_star=None) -> float:
    """1 - λ*/U for a fixed minimum cut of value λ*, checked against p_n.

    λ* comes from the oracle unless given.
    """
    if lambda_star is None:
        lambda_star = min_cut_value(g)
    total = g.total_capacity
    n = g.n_current
    if lambda_star > total:
        raise GraphError(f"minimum cut value {lambda_star} exceeds total capacity {total}")
    if lambda_star < 0 or total <= 0:
        raise GraphError("survival bound needs a connected graph with positive capacity")
    survival = 1 - lambda_star / total
    if isinstance(total, int) and isinstance(lambda_star, int):
        exact_ok = Fraction(total - lambda_star, total) >= Fraction(n - 2, n)
    else:
        exact_ok = survival >= p_n(n) - 1e-12
    if not exact_ok:
        raise GraphError(
            f"survival probability {survival} below p_n = {p_n(n)}: {lambda_star} is not the minimum cut"
        )
    return survival


def analysis_rows(N: int) -> list[dict]:
    """Rows of the analysis CSV for n = 2..N."""
    fpz = q_fpz_recurrence(N)
    opt = q_optimal_recurrence(N)
    policy = q_policy_recurrence(BranchingPolicy.tuned(), N)
    h = harmonic_table(N)
    return [
        {
            "n": n,
            "Q_fpz": fpz.at(n),
            "Q_opt": opt.at(n),
            "Q_opt_policy": policy.at(n),
            "1/(2Hn-2)": 1.0 / (2.0 * h[n] - 2.0),
            "Hn": float(h[n]),
        }
        for n in range(2, N + 1)
    ]
