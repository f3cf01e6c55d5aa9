"""Graph generators: unit cycles, complete graphs, planted cuts, random graphs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from config import RANDOM_GRAPH_RETRIES
from core.errors import GeneratorError, TooFewVerticesError
from core.graph import ContractibleGraph, Cut, build_graph
from core.random_source import RandomSource

logger = logging.getLogger(__name__)

GENERATOR_KINDS = ("cycle", "complete", "planted", "random")


@dataclass
class GeneratedGraph:
    graph: ContractibleGraph
    kind: str
    params: dict = field(default_factory=dict)
    planted_cut: Cut | None = None


def cycle_graph(n: int) -> ContractibleGraph:
    return build_graph(n, [(v, (v + 1) % n, 1) for v in range(n)])


def complete_graph(n: int) -> ContractibleGraph:
    return build_graph(n, [(u, v, 1) for u, v in combinations(range(n), 2)])


def planted_graph(
    sizes: tuple[int, int],
    intra: int = 10,
    inter: int = 1,
    crossing: int = 1,
    rng: RandomSource | None = None,
) -> tuple[ContractibleGraph, Cut]:
    """Two complete clusters joined by ``crossing`` distinct light edges.

    The cluster on vertices 0..sizes[0]-1 is the planted side. Any other
    cut splits a cluster of size c and pays at least (c-1)·intra, so the
    planted cut is minimum whenever that is at least crossing·inter.
    """
    left, right = sizes
    if left < 1 or right < 1:
        raise GeneratorError(f"planted cluster sizes must be positive, got {sizes}")
    if intra <= 0 or inter <= 0:
        raise GeneratorError("planted capacities must be positive")
    if not 1 <= crossing <= left * right:
        raise GeneratorError(f"crossing must lie in 1..{left * right}, got {crossing}")
    for c in (left, right):
        if c >= 2 and (c - 1) * intra < crossing * inter:
            raise GeneratorError(
                f"cluster of size {c} has an internal cut {(c - 1) * intra} lighter than "
                f"the planted cut {crossing * inter}"
            )

    rng = rng or RandomSource(0)
    n = left + right
    edges = [(u, v, intra) for u, v in combinations(range(left), 2)]
    edges += [(u, v, intra) for u, v in combinations(range(left, n), 2)]
    pairs = [(u, v) for u in range(left) for v in range(left, n)]
    chosen = rng.generator.choice(len(pairs), size=crossing, replace=False)
    edges += [(pairs[i][0], pairs[i][1], inter) for i in sorted(chosen.tolist())]

    graph = build_graph(n, edges)
    return graph, Cut(frozenset(range(left)), crossing * inter, n)


def random_graph(
    n: int,
    p: float = 0.5,
    cap_min: int = 1,
    cap_max: int = 1,
    rng: RandomSource | None = None,
    retries: int | None = None,
) -> ContractibleGraph:
    """Erdős–Rényi graph with integer capacities, redrawn until connected."""
    if not 0 < p <= 1:
        raise GeneratorError(f"edge probability must lie in (0, 1], got {p}")
    if not 1 <= cap_min <= cap_max:
        raise GeneratorError(f"capacity range must satisfy 1 <= min <= max, got [{cap_min}, {cap_max}]")
    rng = rng or RandomSource(0)
    retries = RANDOM_GRAPH_RETRIES if retries is None else retries
    rows, cols = np.triu_indices(n, k=1)

    for attempt in range(1, retries + 1):
        keep = rng.generator.random(len(rows)) < p
        weights = rng.generator.integers(cap_min, cap_max + 1, size=int(keep.sum()))
        graph = build_graph(n, zip(rows[keep].tolist(), cols[keep].tolist(), weights.tolist()))
        if graph.is_connected():
            if attempt > 1:
                logger.debug(f"Random graph n={n} p={p} connected after {attempt} attempts")
            return graph

    raise GeneratorError(f"no connected graph with n={n}, p={p} after {retries} attempts")


def generate(kind: str, n: int, seed: int | None = None, **params) -> GeneratedGraph:
    """Dispatch to a generator by name.

    planted params: sizes (default: halves of n), intra, inter, crossing.
    random params: p, cap_min, cap_max.
    """
    if n < 2:
        raise TooFewVerticesError(f"graph needs at least 2 vertices, got {n}")
    rng = RandomSource(seed if seed is not None else 0)

    if kind == "cycle":
        return GeneratedGraph(cycle_graph(n), kind)
    if kind == "complete":
        return GeneratedGraph(complete_graph(n), kind)
    if kind == "planted":
        sizes = tuple(params.pop("sizes", (n // 2, n - n // 2)))
        if len(sizes) != 2 or sum(sizes) != n:
            raise GeneratorError(f"planted sizes {sizes} must be two clusters summing to {n}")
        graph, planted = planted_graph(sizes, rng=rng, **params)
        return GeneratedGraph(graph, kind, {"sizes": sizes, **params}, planted)
    if kind == "random":
        return GeneratedGraph(random_graph(n, rng=rng, **params), kind, dict(params))

    raise GeneratorError(f"unknown generator kind {kind!r}; expected one of {', '.join(GENERATOR_KINDS)}")
