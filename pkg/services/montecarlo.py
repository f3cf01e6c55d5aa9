"""Trial harness: success probabilities, offspring statistics, runtimes.

Every trial draws from its own stream derived from (seed, trial index),
so counts are identical for any number of workers.
"""

from __future__ import annotations

import logging
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from config import BENCH_WARMUP_FRACTION, CONFIDENCE_SIGMAS, DEFAULT_WORKERS
from core.errors import EstimateError, UsageError
from core.generators import cycle_graph, random_graph
from core.graph import ContractibleGraph, Cut, cut_value, is_unit_cycle
from core.random_source import RandomSource
from services.algorithms import ALGORITHM_POLICIES, ALGORITHMS, RunStats, run_algorithm
from services.analysis import karger_single_run_bound, q_fpz_closed, q_policy_recurrence
from services.branching import BranchingPolicy
from services.oracle import canonical_min_cut, min_cut_value

logger = logging.getLogger(__name__)

EVENTS = ("survival", "exact_value", "exact_partition")
BENCH_FAMILIES = ("cycle", "dense")
OFFSPRING_TAGS = ("fpz1", "fpz2", "optimal")


# ─── Value types ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SuccessEstimate:
    trials: int
    successes: int
    event: str
    sigmas: float = CONFIDENCE_SIGMAS

    @property
    def point(self) -> float:
        return self.successes / self.trials

    @property
    def sigma(self) -> float:
        p = self.point
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def ci_low(self) -> float:
        return max(0.0, self.point - self.sigmas * self.sigma)

    @property
    def ci_high(self) -> float:
        return min(1.0, self.point + self.sigmas * self.sigma)

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    @classmethod
    def from_counts(cls, successes: int, trials: int, event: str, sigmas: float = CONFIDENCE_SIGMAS) -> SuccessEstimate:
        if trials < 1:
            raise EstimateError(f"trials must be at least 1, got {trials}")
        if not 0 <= successes <= trials:
            raise EstimateError(f"successes {successes} outside 0..{trials}")
        return cls(trials, successes, event, sigmas)


@dataclass(frozen=True)
class MeanEstimate:
    trials: int
    mean: float
    std: float
    sigmas: float = CONFIDENCE_SIGMAS

    @property
    def half_width(self) -> float:
        return self.sigmas * self.std / math.sqrt(self.trials)

    @property
    def ci_low(self) -> float:
        return self.mean - self.half_width

    @property
    def ci_high(self) -> float:
        return self.mean + self.half_width

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    @classmethod
    def from_samples(cls, samples, sigmas: float = CONFIDENCE_SIGMAS) -> MeanEstimate:
        data = np.asarray(samples, dtype=np.float64)
        if len(data) == 0:
            raise EstimateError("no samples")
        std = float(data.std(ddof=1)) if len(data) > 1 else 0.0
        return cls(len(data), float(data.mean()), std, sigmas)


@dataclass
class ChildCountDistribution:
    """Root offspring counts against the policy's a_k."""

    algorithm: str
    n: int
    trials: int
    counts: dict[int, int]
    reference: dict[int, float]

    def frequency(self, k: int) -> float:
        return self.counts.get(k, 0) / self.trials

    def bucket_deviation(self, k: int) -> float:
        """|observed - expected| in units of the bucket's standard error."""
        p = self.reference.get(k, 0.0)
        sigma = math.sqrt(p * (1 - p) / self.trials)
        gap = abs(self.frequency(k) - p)
        if sigma == 0:
            return 0.0 if gap == 0 else math.inf
        return gap / sigma

    def matches(self, k_max: int, sigmas: float = CONFIDENCE_SIGMAS) -> bool:
        return all(self.bucket_deviation(k) <= sigmas for k in range(1, k_max + 1))


@dataclass
class BenchRecord:
    n: int
    algorithm: str
    family: str
    repetitions: int
    mean_seconds: float
    mean_contractions: float
    mean_calls: float
    expected_calls: float | None = None

    @property
    def ratio(self) -> float:
        """T(n) / (n² ln n)."""
        return self.mean_seconds / (self.n * self.n * math.log(self.n))

    @property
    def seconds_per_call(self) -> float:
        return self.mean_seconds / self.mean_calls

    @property
    def calibrated_ratio(self) -> float | None:
        """Time per call times the exact expected tree size, over n² ln n."""
        if self.expected_calls is None:
            return None
        return self.seconds_per_call * self.expected_calls / (self.n * self.n * math.log(self.n))


@dataclass(slots=True)
class _TrialOutcome:
    cut: Cut
    stats: RunStats

    @property
    def survived(self) -> bool:
        return self.stats.survived

    @property
    def surviving_children(self) -> int:
        return self.stats.top_level_surviving_children

    @property
    def root_children(self) -> int:
        return self.stats.root_children


# ─── Trial pool ─────────────────────────────────────────────────────────────

def _trial_chunk(tag, g, target, seed, start, stop, repetitions) -> list[_TrialOutcome]:
    outcomes = []
    for t in range(start, stop):
        stats = RunStats()
        cut = run_algorithm(tag, g, RandomSource(seed, (t,)), stats, target, repetitions)
        outcomes.append(_TrialOutcome(cut, stats))
    return outcomes


def _run_trials(
    tag: str,
    g: ContractibleGraph,
    target: Cut | None,
    trials: int,
    seed: int,
    workers: int,
    repetitions: int = 1,
) -> list[_TrialOutcome]:
    """Outcomes in trial order, whatever the worker count."""
    if tag not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {tag!r}; expected one of {', '.join(ALGORITHMS)}")
    if trials < 1:
        raise EstimateError(f"trials must be at least 1, got {trials}")
    if workers <= 1 or trials < 2:
        return _trial_chunk(tag, g, target, seed, 0, trials, repetitions)

    chunk = max(1, -(-trials // (workers * 4)))
    bounds = [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]
    outcomes = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_trial_chunk, tag, g, target, seed, start, stop, repetitions)
            for start, stop in bounds
        ]
        for future in futures:
            outcomes.extend(future.result())
    return outcomes


def _validated_target(g: ContractibleGraph, target: Cut | None):
    """(target, λ*), raising if the target is not a minimum cut."""
    lambda_star = min_cut_value(g)
    if target is None:
        return canonical_min_cut(g), lambda_star
    value = cut_value(g, target.side)
    if not math.isclose(value, lambda_star, rel_tol=1e-9, abs_tol=0):
        raise EstimateError(f"target cut has value {value} but the minimum cut is {lambda_star}")
    return Cut(target.side, value, g.n_original), lambda_star


# ─── Estimators ─────────────────────────────────────────────────────────────

def analytic_reference(tag: str, n: int, repetitions: int = 1) -> float | None:
    """Survival probability the analysis predicts for a tight graph (a unit cycle).

    A lower bound on every other graph; None where no closed reference exists.
    """
    if tag in ("fpz1", "fpz2"):
        q = q_fpz_closed(n)
    elif tag == "optimal":
        q = q_policy_recurrence(BranchingPolicy.tuned(), n).at(n)
    elif tag == "karger":
        q = karger_single_run_bound(n)
    else:
        return None
    if repetitions == 1 or q >= 1:
        return q
    return -math.expm1(repetitions * math.log1p(-q))


def estimate_success(
    tag: str,
    g: ContractibleGraph,
    target: Cut | None,
    event: str,
    trials: int,
    seed: int,
    workers: int = DEFAULT_WORKERS,
    repetitions: int = 1,
) -> SuccessEstimate:
    """Fraction of seeded trials in which ``event`` happens.

    survival         some leaf's partition equals the target
    exact_value      the returned value equals λ*
    exact_partition  the returned cut equals the target
    """
    if event not in EVENTS:
        raise UsageError(f"unknown event {event!r}; expected one of {', '.join(EVENTS)}")
    if trials < 1:
        raise EstimateError(f"trials must be at least 1, got {trials}")
    target, lambda_star = _validated_target(g, target)

    started = time.perf_counter()
    outcomes = _run_trials(tag, g, target, trials, seed, workers, repetitions)
    if event == "survival":
        successes = sum(o.survived for o in outcomes)
    elif event == "exact_value":
        successes = sum(math.isclose(o.cut.value, lambda_star, rel_tol=1e-9, abs_tol=0) for o in outcomes)
    else:
        successes = sum(o.cut == target for o in outcomes)

    estimate = SuccessEstimate.from_counts(successes, trials, event)
    logger.info(
        f"{tag} {event} on n={g.n_original}: {successes}/{trials} = {estimate.point:.5f} "
        f"[{estimate.ci_low:.5f}, {estimate.ci_high:.5f}] in {time.perf_counter() - started:.1f}s"
    )
    return estimate


def surviving_children_stats(
    tag: str,
    g: ContractibleGraph,
    target: Cut | None,
    trials: int,
    seed: int,
    workers: int = DEFAULT_WORKERS,
) -> MeanEstimate:
    """Mean number of root children in which the target survives.

    Only on unit cycles is the survival probability per contraction
    exactly p_n, which makes the expected value exactly one.
    """
    if tag not in OFFSPRING_TAGS:
        raise UsageError(f"surviving children are defined for {', '.join(OFFSPRING_TAGS)}, got {tag!r}")
    if not is_unit_cycle(g):
        raise EstimateError("surviving children statistics need an uncontracted unit cycle")
    target, _ = _validated_target(g, target)
    outcomes = _run_trials(tag, g, target, trials, seed, workers)
    estimate = MeanEstimate.from_samples([o.surviving_children for o in outcomes])
    logger.info(f"{tag} surviving children on C{g.n_original}: {estimate.mean:.4f} ± {estimate.half_width:.4f}")
    return estimate


def child_count_distribution(
    tag: str,
    g: ContractibleGraph,
    trials: int,
    seed: int,
    workers: int = DEFAULT_WORKERS,
    k_max: int = 64,
) -> ChildCountDistribution:
    """Histogram of the number of children the root makes."""
    if tag not in ALGORITHM_POLICIES:
        raise UsageError(f"{tag!r} has no per-node offspring policy")
    n = g.n_current
    outcomes = _run_trials(tag, g, None, trials, seed, workers)
    counts = Counter(o.root_children for o in outcomes)
    reference = ALGORITHM_POLICIES[tag].offspring_distribution(n, k_max) if n > 2 else {0: 1.0}
    return ChildCountDistribution(tag, n, trials, dict(sorted(counts.items())), reference)


# ─── Runtime ────────────────────────────────────────────────────────────────

def bench_graph(family: str, n: int, seed: int) -> ContractibleGraph:
    if family == "cycle":
        return cycle_graph(n)
    if family == "dense":
        return random_graph(n, p=0.5, rng=RandomSource(seed, (n,)))
    raise UsageError(f"unknown bench family {family!r}; expected one of {', '.join(BENCH_FAMILIES)}")


def bench_runtime(
    tag: str,
    sizes: list[int],
    repetitions: int,
    seed: int,
    family: str = "dense",
) -> list[BenchRecord]:
    """Mean wall-clock time per run at each size, single-threaded.

    ceil(5%) of the requested repetitions run first as untimed warmup.
    """
    if not sizes:
        raise UsageError("bench needs at least one size")
    if repetitions < 1:
        raise UsageError(f"repetitions must be at least 1, got {repetitions}")
    if tag not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {tag!r}; expected one of {', '.join(ALGORITHMS)}")

    policy = ALGORITHM_POLICIES.get(tag)
    warmup = math.ceil(repetitions * BENCH_WARMUP_FRACTION)
    records = []
    for n in sizes:
        g = bench_graph(family, n, seed)
        g.is_connected()
        rng = RandomSource(seed, (n, 1))
        for _ in range(warmup):
            run_algorithm(tag, g, rng)

        stats = RunStats()
        elapsed = 0.0
        for _ in range(repetitions):
            started = time.perf_counter()
            run_algorithm(tag, g, rng, stats)
            elapsed += time.perf_counter() - started

        record = BenchRecord(
            n=n,
            algorithm=tag,
            family=family,
            repetitions=repetitions,
            mean_seconds=elapsed / repetitions,
            mean_contractions=stats.contractions / repetitions,
            mean_calls=stats.recursive_calls / repetitions,
            expected_calls=policy.expected_calls(n) if policy is not None else None,
        )
        logger.info(
            f"Bench {tag} {family} n={n}: {record.mean_seconds:.4f}s over {record.mean_calls:.0f} calls, "
            f"ratio {record.ratio:.3e}"
        )
        records.append(record)
    return records


def ratio_spread(records: list[BenchRecord], calibrated: bool = False) -> float:
    """max / min of T(n) / (n² ln n), or of the calibrated ratio."""
    if not records:
        raise EstimateError("no bench records")
    ratios = [r.calibrated_ratio if calibrated else r.ratio for r in records]
    if None in ratios:
        raise EstimateError("calibrated ratio needs the expected tree size of a branching algorithm")
    low = min(ratios)
    if low <= 0:
        raise EstimateError("a bench record measured zero time")
    return max(ratios) / low
