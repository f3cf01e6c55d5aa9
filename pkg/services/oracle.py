"""Ground-truth minimum cuts.

Exhaustive enumeration for small graphs and networkx Stoer–Wagner for
everything else. Cuts are identified by the bitmask of the side
containing vertex 0.
"""

import logging

import networkx as nx
import numpy as np

from config import BRUTE_FORCE_MAX_N, ENUMERATION_CHUNK
from core.errors import DisconnectedGraphError, OracleLimitError
from core.graph import ContractibleGraph, Cut, cut_value

logger = logging.getLogger(__name__)


def _all_side_values(g: ContractibleGraph):
    """Yield (masks, values) blocks over every side that contains vertex 0.

    Cut value of indicator b is b·deg - bᵀWb.
    """
    n = g.n_original
    if n > BRUTE_FORCE_MAX_N:
        raise OracleLimitError(
            f"exhaustive search is limited to n <= {BRUTE_FORCE_MAX_N}, graph has {n}; use deterministic_min_cut"
        )
    weights = np.asarray(g.original_capacity)
    degree = weights.sum(axis=1)
    shifts = np.arange(n, dtype=np.int64)
    count = (1 << (n - 1)) - 1  # the all-ones side is the trivial cut

    for start in range(0, count, ENUMERATION_CHUNK):
        stop = min(start + ENUMERATION_CHUNK, count)
        masks = (np.arange(start, stop, dtype=np.int64) << 1) | 1
        bits = ((masks[:, None] >> shifts) & 1).astype(weights.dtype)
        values = bits @ degree - ((bits @ weights) * bits).sum(axis=1)
        yield masks, values


def brute_force_min_cut(g: ContractibleGraph) -> Cut:
    """Exact minimum over all 2^(n-1) - 1 sides; ties go to the smallest bitmask."""
    best_mask, best_value = None, None
    for masks, values in _all_side_values(g):
        i = int(np.argmin(values))
        if best_value is None or values[i] < best_value:
            best_mask, best_value = int(masks[i]), values[i].item()
    return Cut.from_mask(best_mask, best_value, g.n_original)


def enumerate_min_cuts(g: ContractibleGraph) -> list[Cut]:
    """Every distinct minimum cut, ordered by bitmask."""
    best_value = brute_force_min_cut(g).value
    found = []
    for masks, values in _all_side_values(g):
        if g.fractional:
            hits = np.isclose(values, best_value, rtol=1e-9, atol=0)
        else:
            hits = values == best_value
        found.extend(int(m) for m in masks[hits])
    return [Cut.from_mask(m, best_value, g.n_original) for m in found]


def deterministic_min_cut(g: ContractibleGraph) -> Cut:
    """Stoer–Wagner global minimum cut via networkx, valued exactly against g."""
    if not g.is_connected():
        raise DisconnectedGraphError("graph is disconnected; its minimum cut is 0 and trivial to read off")
    n = g.n_original
    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(range(n))
    nx_graph.add_weighted_edges_from(g.original_edges())
    _, (side, _) = nx.stoer_wagner(nx_graph, weight="weight")
    value = cut_value(g, side)
    logger.debug(f"Stoer-Wagner on n={n}: minimum cut {value}")
    return Cut(frozenset(side), value, n)


def min_cut_value(g: ContractibleGraph) -> int | float:
    """λ* from whichever oracle fits the graph size."""
    if g.n_original <= BRUTE_FORCE_MAX_N:
        return brute_force_min_cut(g).value
    return deterministic_min_cut(g).value


def canonical_min_cut(g: ContractibleGraph) -> Cut:
    """A minimum cut chosen deterministically: smallest bitmask when enumerable."""
    if g.n_original <= BRUTE_FORCE_MAX_N:
        return brute_force_min_cut(g)
    return deterministic_min_cut(g)
