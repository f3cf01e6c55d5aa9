"""Contraction-based minimum cut algorithms.

Karger's single run, repeated Karger, the classic Karger–Stein
recursion, both formulations of the FPZ recursive contraction algorithm,
and the tuned one-or-two-calls variant.

The recursive algorithms share one iterative engine: a private working
copy of the graph is contracted in place on the way down and restored
from O(n) undo records on the way back up, so a call costs O(n) and the
Python stack depth stays constant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields
from itertools import product

import numpy as np

from config import FPZ_REPEAT_CAP, KARGER_STEIN_BASE_SIZE
from core.errors import DisconnectedGraphError, InvalidCutError, RecursionCapError, UsageError
from core.graph import ContractibleGraph, Cut, _Contraction, sample_edge
from core.random_source import RandomSource
from services.branching import BranchingPolicy, p_n

logger = logging.getLogger(__name__)


@dataclass
class RunStats:
    """Instrumentation of one recursion tree (or several, when merged).

    recursive_calls counts every invocation including the root; a graph
    that is already at two supernodes is one call with no children.
    """

    recursive_calls: int = 0
    contractions: int = 0
    leaves: int = 0
    survival_leaves: int = 0
    top_level_surviving_children: int = 0
    root_children: int = 0

    @property
    def survived(self) -> bool:
        return self.survival_leaves > 0

    def merge(self, other: RunStats) -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))


class _Search:
    """Incumbent cut and tracked-cut bookkeeping for one run."""

    def __init__(self, n_original: int, target: Cut | None, stats: RunStats):
        self.n_original = n_original
        self.stats = stats
        self.best: Cut | None = None
        self._side = None
        if target is not None:
            if target.n_vertices != n_original:
                raise InvalidCutError(
                    f"target cut is over {target.n_vertices} vertices, graph has {n_original}"
                )
            self._side = [v in target.side for v in range(n_original)]

    def keeps_target(self, members: list, a: int, b: int) -> bool:
        """Whether contracting (a, b) leaves the tracked cut intact."""
        if self._side is None:
            return True
        return self._side[members[a][0]] == self._side[members[b][0]]

    def offer(self, side, value, intact: bool) -> None:
        self.stats.leaves += 1
        if intact and self._side is not None:
            self.stats.survival_leaves += 1
        if self.best is None or value < self.best.value:
            self.best = Cut(frozenset(side), value, self.n_original)


def _prepare(g: ContractibleGraph) -> None:
    if not g.is_connected():
        raise DisconnectedGraphError("graph is disconnected; contraction algorithms need a connected graph")


# ─── Shared branching engine ───────────────────────────────────────────────

@dataclass(slots=True)
class _Frame:
    size: int
    record: _Contraction | None
    intact: bool
    remaining: int
    spawned: int = 0


def _branching_search(
    g: ContractibleGraph,
    rng: RandomSource,
    stats: RunStats | None,
    target: Cut | None,
    policy: BranchingPolicy | None = None,
    repeat_cap: int | None = None,
) -> Cut:
    """Run one recursion tree.

    With a policy, a node of size n draws its child count up front. Without
    one, the node follows the coin-flip formulation: before each child it
    draws r, and that child is the last one when r <= p_n.
    """
    _prepare(g)
    stats = stats if stats is not None else RunStats()
    repeat_cap = FPZ_REPEAT_CAP if repeat_cap is None else repeat_cap
    work = g.copy()
    search = _Search(work.n_original, target, stats)

    def open_frame(size: int, record, intact: bool) -> _Frame:
        stats.recursive_calls += 1
        if size <= 2:
            return _Frame(size, record, intact, 0)
        if policy is None:
            return _Frame(size, record, intact, 1)
        return _Frame(size, record, intact, policy.draw(size, rng))

    root = open_frame(work.n_current, None, True)
    stack = [root]
    while stack:
        frame = stack[-1]
        if frame.size == 2:
            search.offer(work._members[work._live[0]], work.total_capacity, frame.intact)
        elif frame.remaining > 0:
            if policy is None:
                if frame.spawned >= repeat_cap:
                    raise RecursionCapError(
                        f"{frame.spawned} same-size repeats at n={frame.size} exceeded the cap of {repeat_cap}"
                    )
                if rng.uniform() <= p_n(frame.size):
                    frame.remaining = 0
            else:
                frame.remaining -= 1
            a, b = sample_edge(work, rng)
            intact = frame.intact and search.keeps_target(work._members, a, b)
            record = work._contract_in_place(a, b)
            frame.spawned += 1
            stats.contractions += 1
            if frame is root:
                stats.root_children += 1
                if intact:
                    stats.top_level_surviving_children += 1
            stack.append(open_frame(frame.size - 1, record, intact))
            continue

        stack.pop()
        if frame.record is not None:
            work._undo(frame.record)

    return search.best


# ─── Algorithms ─────────────────────────────────────────────────────────────

def karger_single_run(
    g: ContractibleGraph,
    rng: RandomSource,
    stats: RunStats | None = None,
    target: Cut | None = None,
) -> Cut:
    """Contract random edges down to two supernodes: exactly n-2 contractions."""
    return _branching_search(g, rng, stats, target, BranchingPolicy.fixed(1))


def karger_repeated(
    g: ContractibleGraph,
    repetitions: int,
    rng: RandomSource,
    stats: RunStats | None = None,
    target: Cut | None = None,
) -> Cut:
    """Best cut over independent single runs drawn from one stream."""
    if repetitions < 1:
        raise UsageError(f"repetitions must be at least 1, got {repetitions}")
    best = None
    for _ in range(repetitions):
        cut = karger_single_run(g, rng, stats, target)
        if best is None or cut.value < best.value:
            best = cut
    return best


def fpz_v1(
    g: ContractibleGraph,
    rng: RandomSource,
    stats: RunStats | None = None,
    target: Cut | None = None,
) -> Cut:
    """FPZ recursion drawing k ~ Geometric(p_n) children up front."""
    return _branching_search(g, rng, stats, target, BranchingPolicy.geometric())


def fpz_v2(
    g: ContractibleGraph,
    rng: RandomSource,
    stats: RunStats | None = None,
    target: Cut | None = None,
    repeat_cap: int | None = None,
) -> Cut:
    """FPZ recursion as a coin-flip loop: recurse, then with probability
    1 - p_n recurse again on the same graph."""
    return _branching_search(g, rng, stats, target, None, repeat_cap)


def optimal_variant(
    g: ContractibleGraph,
    rng: RandomSource,
    stats: RunStats | None = None,
    target: Cut | None = None,
) -> Cut:
    """One call w.p. (n-4)/(n-2), two otherwise (n >= 4); three calls at n = 3."""
    return _branching_search(g, rng, stats, target, BranchingPolicy.tuned())


def _exhaustive_supernode_cut(h: ContractibleGraph) -> tuple[list[int], int | float]:
    """Minimum over every bipartition of the (compacted) live supernodes."""
    m = h.n_current
    cap = h._cap[:m, :m]
    best_side, best_value = None, None
    # supernode 0 stays on the first side; the all-ones choice is the trivial cut
    for bits in product((False, True), repeat=m - 1):
        if all(bits):
            continue
        side = np.array((True,) + bits)
        value = cap[np.ix_(side, ~side)].sum().item()
        if best_value is None or value < best_value:
            best_side, best_value = side, value
    originals = [v for slot in np.flatnonzero(best_side) for v in h._members[slot]]
    return originals, best_value


def karger_stein(
    g: ContractibleGraph,
    rng: RandomSource,
    stats: RunStats | None = None,
    target: Cut | None = None,
) -> Cut:
    """Classic Karger–Stein: two independent contractions to ceil(n/√2 + 1)
    supernodes, recurse on both, keep the better cut; exhaustive search at
    n <= 6."""
    _prepare(g)
    stats = stats if stats is not None else RunStats()
    search = _Search(g.n_original, target, stats)

    def recurse(h: ContractibleGraph, intact: bool, depth: int) -> None:
        stats.recursive_calls += 1
        m = h.n_current
        if m <= KARGER_STEIN_BASE_SIZE:
            side, value = _exhaustive_supernode_cut(h)
            search.offer(side, value, intact)
            return
        t = math.ceil(m / math.sqrt(2) + 1)
        for _ in range(2):
            child = h.copy()
            child_intact = intact
            while child.n_current > t:
                a, b = sample_edge(child, rng)
                child_intact = child_intact and search.keeps_target(child._members, a, b)
                child._contract_in_place(a, b)
                stats.contractions += 1
            if depth == 0:
                stats.root_children += 1
                if child_intact:
                    stats.top_level_surviving_children += 1
            recurse(child.compact(), child_intact, depth + 1)

    recurse(g.compact(), True, 0)
    return search.best


ALGORITHMS = {
    "karger": karger_single_run,
    "karger-stein": karger_stein,
    "fpz1": fpz_v1,
    "fpz2": fpz_v2,
    "optimal": optimal_variant,
}

# Offspring policy of each tree-shaped algorithm; Karger–Stein is not one.
ALGORITHM_POLICIES = {
    "karger": BranchingPolicy.fixed(1),
    "fpz1": BranchingPolicy.geometric(),
    "fpz2": BranchingPolicy.geometric(),
    "optimal": BranchingPolicy.tuned(),
}


def run_algorithm(
    tag: str,
    g: ContractibleGraph,
    rng: RandomSource,
    stats: RunStats | None = None,
    target: Cut | None = None,
    repetitions: int = 1,
) -> Cut:
    """Best cut of ``repetitions`` runs of the named algorithm on one stream."""
    if tag not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {tag!r}; expected one of {', '.join(ALGORITHMS)}")
    if repetitions < 1:
        raise UsageError(f"repetitions must be at least 1, got {repetitions}")
    if tag == "karger":
        return karger_repeated(g, repetitions, rng, stats, target)
    algorithm = ALGORITHMS[tag]
    best = None
    for _ in range(repetitions):
        cut = algorithm(g, rng, stats, target)
        if best is None or cut.value < best.value:
            best = cut
    return best
