"""MaxCut instances: cut evaluation, a brute-force oracle, and edge-list text I/O.

Assignments are bitstrings whose leftmost character is node 0. The same
ordering is used for statevector basis indices, so ``cut_value_table``
can be consumed directly as a diagonal observable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Exhaustive enumeration and dense simulation share this ceiling.
ENUMERATION_LIMIT = 24


class ParseError(ValueError):
    """Malformed edge-list text; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class CapacityError(ValueError):
    """Instance too large for exhaustive enumeration."""


@dataclass(frozen=True)
class MaxCutInstance:
    """Undirected weighted graph on nodes 0..n-1.

    Edges are stored as (min, max) pairs and must be unique after that
    normalization; weights align with edges and default to 1.0 each.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"node count must be a positive integer, got {self.n!r}")
        norm = []
        seen = set()
        for edge in self.edges:
            try:
                u, v = edge
            except (TypeError, ValueError):
                raise ValueError(f"edge {edge!r} is not a pair") from None
            if not (0 <= u < self.n) or not (0 <= v < self.n):
                raise ValueError(f"edge {edge!r} references a node outside 0..{self.n - 1}")
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        weights = self.weights
        if not weights:
            weights = (1.0,) * len(norm)
        if len(weights) != len(norm):
            raise ValueError(
                f"{len(weights)} weights for {len(norm)} edges"
            )
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "weights", tuple(float(w) for w in weights))

    @property
    def total_weight(self) -> float:
        return float(sum(self.weights))


@dataclass(frozen=True)
class Cut:
    """A concrete assignment together with its cut value."""

    assignment: str
    value: float

    @classmethod
    def of(cls, instance: MaxCutInstance, assignment: str) -> "Cut":
        return cls(assignment, cut_value(instance, assignment))


def _validate_assignment(n: int, assignment: str) -> None:
    if not isinstance(assignment, str) or len(assignment) != n:
        raise ValueError(f"assignment must be a {n}-character bitstring, got {assignment!r}")
    if set(assignment) - {"0", "1"}:
        raise ValueError(f"assignment {assignment!r} contains characters other than 0/1")


def cut_value(instance: MaxCutInstance, assignment: str) -> float:
    """Total weight of edges whose endpoints land on opposite sides."""
    _validate_assignment(instance.n, assignment)
    total = 0.0
    for (u, v), w in zip(instance.edges, instance.weights):
        if assignment[u] != assignment[v]:
            total += w
    return total


@lru_cache(maxsize=128)
def cut_value_table(instance: MaxCutInstance) -> np.ndarray:
    """Cut value for every basis index 0..2^n-1, leftmost bit = node 0.

    Cached per instance; the returned array is read-only.
    """
    if instance.n > ENUMERATION_LIMIT:
        raise CapacityError(
            f"n={instance.n} exceeds the enumeration limit of {ENUMERATION_LIMIT}"
        )
    idx = np.arange(1 << instance.n, dtype=np.int64)
    table = np.zeros(idx.size)
    for (u, v), w in zip(instance.edges, instance.weights):
        bu = (idx >> (instance.n - 1 - u)) & 1
        bv = (idx >> (instance.n - 1 - v)) & 1
        table += w * (bu ^ bv)
    table.flags.writeable = False
    return table


def brute_force_maxcut(instance: MaxCutInstance) -> tuple[float, set[str]]:
    """Exhaustive optimum: (max cut value, set of all optimal assignments).

    Complement pairs always appear together. Raises CapacityError above
    the enumeration limit. Ties are exact float ties, which is safe here
    because complements sum the same weights in the same order.
    """
    table = cut_value_table(instance)
    best = float(table.max())
    width = instance.n
    optima = {format(i, f"0{width}b") for i in np.flatnonzero(table == best)}
    return best, optima


def canonical_instance() -> MaxCutInstance:
    """The 5-node complete bipartite benchmark graph K_{2,3}.

    All six unit edges between parts {0, 1, 2} and {3, 4}; max cut 6,
    attained exactly at 00011 and 11100.
    """
    return MaxCutInstance(
        n=5,
        edges=((0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4)),
    )


# ---------------------------------------------------------------------------
# edge-list text format
# ---------------------------------------------------------------------------
# Line 1: node count. Each further line: "u v" or "u v weight".
# '#' starts a comment; blank lines are ignored.


def parse_edge_list(text: str) -> MaxCutInstance:
    """Parse edge-list text; raise ParseError with a line number on bad input."""
    n = None
    edges: list[tuple[int, int]] = []
    weights: list[float] = []
    seen: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if n is None:
            if len(tokens) != 1:
                raise ParseError(line_no, f"expected a single node count, got {raw.strip()!r}")
            try:
                n = int(tokens[0])
            except ValueError:
                raise ParseError(line_no, f"node count {tokens[0]!r} is not an integer") from None
            if n < 1:
                raise ParseError(line_no, f"node count must be positive, got {n}")
            continue
        if len(tokens) not in (2, 3):
            raise ParseError(line_no, f"expected 'u v' or 'u v weight', got {raw.strip()!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(line_no, f"endpoints {tokens[0]!r} {tokens[1]!r} must be integers") from None
        if not (0 <= u < n) or not (0 <= v < n):
            raise ParseError(line_no, f"edge ({u}, {v}) references a node outside 0..{n - 1}")
        if u == v:
            raise ParseError(line_no, f"self-loop on node {u}")
        weight = 1.0
        if len(tokens) == 3:
            try:
                weight = float(tokens[2])
            except ValueError:
                raise ParseError(line_no, f"weight {tokens[2]!r} is not a number") from None
            if not np.isfinite(weight):
                raise ParseError(line_no, f"weight {weight} is not finite")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(line_no, f"duplicate edge {key}")
        seen.add(key)
        edges.append(key)
        weights.append(weight)
    if n is None:
        raise ParseError(1, "empty input: missing node count")
    return MaxCutInstance(n=n, edges=tuple(edges), weights=tuple(weights))


def serialize_edge_list(instance: MaxCutInstance) -> str:
    """Inverse of parse_edge_list; unit weights are omitted."""
    lines = [str(instance.n)]
    for (u, v), w in zip(instance.edges, instance.weights):
        if w == 1.0:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{u} {v} {w!r}")
    return "\n".join(lines) + "\n"
