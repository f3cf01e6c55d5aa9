"""Exception hierarchy shared by the whole lab.

The CLI maps these onto exit codes; library code only raises.
"""


class MinCutError(Exception):
    """Base class for every error raised by the lab."""


# ─── Graph values ───────────────────────────────────────────────────────────

class GraphError(MinCutError, ValueError):
    """Invalid graph input or an illegal operation on a graph."""


class TooFewVerticesError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class NegativeCapacityError(GraphError):
    pass


class VertexRangeError(GraphError):
    pass


class GraphTooLargeError(GraphError):
    pass


class NoContractibleEdgeError(GraphError):
    def __init__(self, message: str = "no contractible edge"):
        super().__init__(message)


class ContractionError(GraphError):
    pass


class InvalidCutError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class GeneratorError(GraphError):
    pass


class CapacityOverflowError(GraphError):
    pass


class GraphParseError(MinCutError, ValueError):
    """Malformed graph text. ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.reason = message


# ─── Algorithms, oracle, analysis, harness ─────────────────────────────────

class RecursionCapError(MinCutError, RuntimeError):
    pass


class OracleLimitError(MinCutError, ValueError):
    pass


class RecurrenceError(MinCutError, ArithmeticError):
    pass


class EstimateError(MinCutError, ValueError):
    pass


class UsageError(MinCutError, ValueError):
    pass
