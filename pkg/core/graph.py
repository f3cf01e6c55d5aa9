"""Contractible capacity-weighted multigraph and cut values.

The capacity matrix is dense and indexed by supernode id. A supernode
keeps the id of the vertex it grew from, so ids are stable small
integers and membership is an array lookup. Contraction touches one row
and one column of the live submatrix, which keeps it linear in the
number of live supernodes.
"""

from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate

import networkx as nx
import numpy as np

from config import DENSE_MATRIX_LIMIT
from core.errors import (
    CapacityOverflowError,
    ContractionError,
    GraphError,
    GraphTooLargeError,
    InvalidCutError,
    NegativeCapacityError,
    NoContractibleEdgeError,
    SelfLoopError,
    TooFewVerticesError,
    VertexRangeError,
)
from core.random_source import RandomSource

logger = logging.getLogger(__name__)

# Cut values and degree prefix sums reach twice the total capacity.
MAX_TOTAL_CAPACITY = np.iinfo(np.int64).max // 2
# rows up to this length are sampled with Python lists instead of numpy
SMALL_ROW = 48


# ─── Cut ────────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class Cut:
    """A bipartition of the original vertices with its capacity.

    The stored side is always the one containing vertex 0, so two cuts
    describing complementary sides compare equal.
    """

    side: frozenset
    value: int | float
    n_vertices: int

    def __post_init__(self):
        side = frozenset(int(v) for v in self.side)
        if any(v < 0 or v >= self.n_vertices for v in side):
            raise InvalidCutError(f"cut side has vertices outside 0..{self.n_vertices - 1}")
        if not side or len(side) >= self.n_vertices:
            raise InvalidCutError("cut side must be a nonempty proper subset of the vertices")
        if 0 not in side:
            side = frozenset(range(self.n_vertices)) - side
        object.__setattr__(self, "side", side)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cut):
            return NotImplemented
        return self.n_vertices == other.n_vertices and self.side == other.side

    def __hash__(self) -> int:
        return hash((self.n_vertices, self.side))

    @property
    def complement(self) -> frozenset:
        return frozenset(range(self.n_vertices)) - self.side

    @property
    def mask(self) -> int:
        """Bitmask of the side containing vertex 0; the canonical cut identity."""
        return sum(1 << v for v in self.side)

    def sorted_side(self) -> list[int]:
        return sorted(self.side)

    @classmethod
    def from_mask(cls, mask: int, value, n_vertices: int) -> Cut:
        return cls(frozenset(v for v in range(n_vertices) if mask >> v & 1), value, n_vertices)


# ─── Graph ──────────────────────────────────────────────────────────────────

@dataclass(slots=True)
class _Contraction:
    """Everything needed to undo one in-place contraction."""

    a: int
    b: int
    live: np.ndarray
    row: np.ndarray
    degree: int | float
    total: int | float
    size: int


class ContractibleGraph:
    """Capacity-weighted multigraph with supernode tracking.

    From the caller's side a graph is an immutable value: every public
    operation that changes the graph returns a new one. Algorithms copy
    once and then use ``_contract_in_place`` / ``_undo`` on the private
    copy.
    """

    def __init__(self, capacity: np.ndarray):
        n = capacity.shape[0]
        self._original = capacity
        self._original.setflags(write=False)
        self._cap = capacity.copy()
        self._degree = self._cap.sum(axis=1)
        self._live = np.arange(n)
        self._alive = np.ones(n, dtype=bool)
        self._members = [[v] for v in range(n)]
        self._total = np.triu(capacity).sum().item()
        self._connected: bool | None = None

    # ── read-only views ──

    @property
    def n_original(self) -> int:
        return self._original.shape[0]

    @property
    def n_current(self) -> int:
        return len(self._live)

    @property
    def total_capacity(self) -> int | float:
        return self._total

    @property
    def fractional(self) -> bool:
        return self._original.dtype.kind == "f"

    @property
    def live(self) -> tuple[int, ...]:
        return tuple(int(a) for a in self._live)

    @property
    def membership(self) -> np.ndarray:
        """Original vertex id -> supernode id."""
        owner = np.empty(self.n_original, dtype=np.int64)
        for a in self._live:
            owner[self._members[a]] = a
        return owner

    @property
    def original_capacity(self) -> np.ndarray:
        return self._original

    def is_live(self, a: int) -> bool:
        return 0 <= a < len(self._alive) and bool(self._alive[a])

    def capacity(self, a: int, b: int) -> int | float:
        self._require_live(a)
        self._require_live(b)
        if a == b:
            return 0
        return self._cap[a, b].item()

    def degree(self, a: int) -> int | float:
        self._require_live(a)
        return self._degree[a].item()

    def members(self, a: int) -> frozenset:
        self._require_live(a)
        return frozenset(self._members[a])

    def edges(self) -> list[tuple[int, int, int | float]]:
        """Positive-capacity live pairs as sorted (a, b, capacity), a < b."""
        live = np.sort(self._live)
        sub = self._cap[np.ix_(live, live)]
        rows, cols = np.nonzero(np.triu(sub, k=1))
        return [(int(live[r]), int(live[c]), sub[r, c].item()) for r, c in zip(rows, cols)]

    def original_edges(self) -> list[tuple[int, int, int | float]]:
        rows, cols = np.nonzero(np.triu(self._original, k=1))
        return [(int(r), int(c), self._original[r, c].item()) for r, c in zip(rows, cols)]

    def is_connected(self) -> bool:
        """Whether the live supernodes form one component (cached; contraction preserves it)."""
        if self._connected is None:
            live = self._live
            sub = self._cap[np.ix_(live, live)]
            rows, cols = np.nonzero(np.triu(sub, k=1))
            nx_graph = nx.Graph()
            nx_graph.add_nodes_from(range(len(live)))
            nx_graph.add_edges_from(zip(rows.tolist(), cols.tolist()))
            self._connected = nx.is_connected(nx_graph)
        return self._connected

    # ── copies ──

    def copy(self) -> ContractibleGraph:
        clone = object.__new__(ContractibleGraph)
        clone._original = self._original
        clone._cap = self._cap.copy()
        clone._degree = self._degree.copy()
        clone._live = self._live.copy()
        clone._alive = self._alive.copy()
        clone._members = [list(m) for m in self._members]
        clone._total = self._total
        clone._connected = self._connected
        return clone

    def compact(self) -> ContractibleGraph:
        """Equivalent graph with live supernodes renumbered 0..m-1."""
        live = self._live
        clone = object.__new__(ContractibleGraph)
        clone._original = self._original
        clone._cap = self._cap[np.ix_(live, live)].copy()
        clone._degree = self._degree[live].copy()
        clone._live = np.arange(len(live))
        clone._alive = np.ones(len(live), dtype=bool)
        clone._members = [list(self._members[a]) for a in live]
        clone._total = self._total
        clone._connected = self._connected
        return clone

    # ── in-place engine primitives ──

    def _contract_in_place(self, a: int, b: int) -> _Contraction:
        """Merge supernode b into a. Caller guarantees a != b, both live."""
        live = self._live
        row = self._cap[a, live]
        record = _Contraction(
            a, b, live, row, self._degree[a].item(), self._total, len(self._members[a])
        )
        joint = self._cap[a, b].item()
        merged = row + self._cap[b, live]
        self._cap[a, live] = merged
        self._cap[live, a] = merged
        self._cap[a, a] = 0
        self._degree[a] += self._degree[b] - 2 * joint
        self._total -= joint
        self._members[a].extend(self._members[b])
        self._alive[b] = False
        self._live = live[live != b]
        return record

    def _undo(self, record: _Contraction) -> None:
        self._live = record.live
        self._alive[record.b] = True
        self._cap[record.a, record.live] = record.row
        self._cap[record.live, record.a] = record.row
        self._degree[record.a] = record.degree
        self._total = record.total
        del self._members[record.a][record.size:]

    def _require_live(self, a: int) -> None:
        if not self.is_live(a):
            raise ContractionError(f"supernode {a} is not live")

    def __repr__(self) -> str:
        return (
            f"ContractibleGraph(n_original={self.n_original}, "
            f"n_current={self.n_current}, total_capacity={self._total})"
        )


# ─── Operations ─────────────────────────────────────────────────────────────

def build_graph(
    n: int,
    edges,
    *,
    fractional: bool = False,
) -> ContractibleGraph:
    """Build a graph from (u, v, capacity) triples.

    Parallel edges are merged by summing capacities and zero-capacity
    edges disappear.
    """
    if n < 2:
        raise TooFewVerticesError(f"graph needs at least 2 vertices, got {n}")
    if n > DENSE_MATRIX_LIMIT:
        raise GraphTooLargeError(
            f"{n} vertices exceeds the dense matrix limit of {DENSE_MATRIX_LIMIT} "
            f"(about {8 * n * n / 2**20:.0f} MiB per capacity matrix)"
        )

    capacity = np.zeros((n, n), dtype=np.float64 if fractional else np.int64)
    total = 0
    for index, (u, v, w) in enumerate(edges):
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise VertexRangeError(f"edge {index}: vertex id out of range 0..{n - 1}: ({u}, {v})")
        if u == v:
            raise SelfLoopError(f"edge {index}: self-loop on vertex {u}")
        if w < 0:
            raise NegativeCapacityError(f"edge {index}: negative capacity {w}")
        if not fractional:
            if int(w) != w:
                raise GraphError(f"edge {index}: fractional capacity {w} needs fractional=True")
            w = int(w)
            total += w
            if total > MAX_TOTAL_CAPACITY:
                raise CapacityOverflowError(
                    f"edge {index}: total capacity {total} exceeds the integer limit {MAX_TOTAL_CAPACITY}"
                )
        capacity[u, v] += w
        capacity[v, u] += w
    return ContractibleGraph(capacity)


def _pick_index(weights: np.ndarray, rng: RandomSource) -> int:
    if len(weights) <= SMALL_ROW:
        cumulative = list(accumulate(weights.tolist()))
        index = bisect_right(cumulative, rng.below(cumulative[-1]))
    else:
        cumulative = np.cumsum(weights)
        index = int(np.searchsorted(cumulative, rng.below(cumulative[-1].item()), side="right"))
    if index >= len(cumulative):
        # float rounding can put the draw on the upper edge
        index = int(np.flatnonzero(weights)[-1])
    return index


def sample_edge(g: ContractibleGraph, rng: RandomSource) -> tuple[int, int]:
    """Draw a supernode pair with probability u(a, b) / U.

    A row is drawn proportionally to weighted degree, then a column
    proportionally to that row; each unordered pair is reachable from
    both ends, giving 2·u(a, b) / 2U.
    """
    if g._total <= 0:
        raise NoContractibleEdgeError()
    live = g._live
    a = int(live[_pick_index(g._degree[live], rng)])
    b = int(live[_pick_index(g._cap[a, live], rng)])
    return (a, b) if a < b else (b, a)


def contract(g: ContractibleGraph, a: int, b: int) -> ContractibleGraph:
    """Return a new graph with supernodes a and b identified."""
    if a == b:
        raise ContractionError(f"cannot contract supernode {a} with itself")
    if not g.is_live(a) or not g.is_live(b):
        raise ContractionError(f"cannot contract dead supernode pair ({a}, {b})")
    if g.n_current <= 2:
        raise ContractionError("contraction at 2 supernodes would destroy the last cut")
    merged = g.copy()
    merged._contract_in_place(a, b)
    return merged


def _side_mask(n: int, side) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    for v in side:
        v = int(v)
        if not 0 <= v < n:
            raise InvalidCutError(f"vertex {v} outside 0..{n - 1}")
        mask[v] = True
    count = int(mask.sum())
    if count == 0 or count == n:
        raise InvalidCutError("cut side must be a nonempty proper subset of the vertices")
    return mask


def cut_value(g: ContractibleGraph, side) -> int | float:
    """u(δ(S)) against the original, uncontracted capacities."""
    mask = _side_mask(g.n_original, side)
    return g._original[np.ix_(mask, ~mask)].sum().item()


def cut_of_supernode(g: ContractibleGraph) -> Cut:
    """The cut defined by a fully contracted (two-supernode) graph."""
    if g.n_current != 2:
        raise ContractionError(f"cut_of_supernode needs 2 supernodes, graph has {g.n_current}")
    side = g._members[g._live[0]]
    return Cut(frozenset(side), cut_value(g, side), g.n_original)


def is_unit_cycle(g: ContractibleGraph) -> bool:
    """An uncontracted connected graph where every vertex has two unit edges."""
    n = g.n_original
    if n < 3 or g.n_current != n:
        return False
    original = g._original
    if not np.isin(original, (0, 1)).all():
        return False
    if not (original.sum(axis=1) == 2).all():
        return False
    return g.is_connected()
