"""Plain-text graph format.

    n m
    u v w        (m lines, 0 <= u < v < n, w a nonnegative integer)

Lines starting with ``#`` are comments. Serialisation writes edges in
canonical (u, v) order and ends with a newline.
"""

import logging

from core.errors import GraphError, GraphParseError
from core.graph import MAX_TOTAL_CAPACITY, ContractibleGraph, build_graph

logger = logging.getLogger(__name__)


def _parse_ints(fields: list[str], line_no: int, what: str) -> list[int]:
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise GraphParseError(f"malformed {what}: expected integers, got {' '.join(fields)!r}", line_no) from None


def parse_graph(text: str) -> ContractibleGraph:
    header = None
    edges = []
    last_line = 0
    total = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        last_line = line_no
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()

        if header is None:
            if len(fields) != 2:
                raise GraphParseError(f"malformed header: expected 'n m', got {line!r}", line_no)
            n, m = _parse_ints(fields, line_no, "header")
            if n < 2:
                raise GraphParseError(f"malformed header: n must be at least 2, got {n}", line_no)
            if m < 0:
                raise GraphParseError(f"malformed header: negative edge count {m}", line_no)
            header = (n, m)
            continue

        n, m = header
        if len(edges) == m:
            raise GraphParseError(f"wrong edge count: header declares {m} edges, found more", line_no)
        if len(fields) != 3:
            raise GraphParseError(f"malformed edge: expected 'u v w', got {line!r}", line_no)
        u, v, w = _parse_ints(fields, line_no, "edge")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"vertex id out of range 0..{n - 1}: {u} {v}", line_no)
        if u == v:
            raise GraphParseError(f"self-loop on vertex {u}", line_no)
        if u > v:
            raise GraphParseError(f"edge endpoints must satisfy u < v, got {u} {v}", line_no)
        if w < 0:
            raise GraphParseError(f"negative capacity {w}", line_no)
        total += w
        if total > MAX_TOTAL_CAPACITY:
            raise GraphParseError(f"capacity overflow: total capacity {total} exceeds {MAX_TOTAL_CAPACITY}", line_no)
        edges.append((u, v, w))

    if header is None:
        raise GraphParseError("malformed header: missing 'n m' line", last_line + 1)
    n, m = header
    if len(edges) != m:
        raise GraphParseError(f"wrong edge count: header declares {m} edges, found {len(edges)}", last_line + 1)

    try:
        graph = build_graph(n, edges)
    except GraphError as e:
        raise GraphParseError(str(e), last_line) from e
    logger.debug(f"Parsed graph with {n} vertices and {m} edge lines")
    return graph


def serialize_graph(g: ContractibleGraph) -> str:
    """Text form of the live graph, with supernodes renumbered 0..m-1 if contracted."""
    if g.fractional:
        raise GraphError("the text format carries integer capacities only")
    compacted = g.compact() if g.n_current != g.n_original else g
    edges = compacted.edges()
    lines = [f"{compacted.n_current} {len(edges)}"]
    lines += [f"{u} {v} {w}" for u, v, w in edges]
    return "\n".join(lines) + "\n"


def read_graph_file(path: str) -> ContractibleGraph:
    with open(path, "rb") as f:
        data = f.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data[: e.start].count(b"\n") + 1
        raise GraphParseError(f"not UTF-8 text: byte 0x{data[e.start]:02x} at offset {e.start}", line) from None
    return parse_graph(text)


def write_graph_file(g: ContractibleGraph, path: str) -> str:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_graph(g))
    logger.info(f"Wrote graph with {g.n_current} vertices to {path}")
    return path
