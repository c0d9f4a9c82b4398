"""Game graphs: finite undirected boards with payoff-carrying terminal nodes.

A board is a finite undirected graph whose nodes are dense integer indices.
Interior (running) nodes are where play continues; terminal nodes end the
game and pay Player I the attached payoff.  Graphs are immutable after
construction, so values and strategies can index into a fixed topology and
instances are safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import ValidationError

__all__ = [
    "GameGraph",
    "GameSpec",
    "build_segment",
    "build_star",
    "validate",
    "spec_to_json",
    "spec_from_json",
]


@dataclass(frozen=True)
class GameGraph:
    """Undirected graph with payoffs on its terminal nodes.

    ``neighbors[i]`` is the sorted tuple of nodes adjacent to ``i``;
    ``payoffs[i]`` is the terminal payoff at ``i`` or ``None`` for interior
    nodes.  Terminal payoffs are what Player II pays Player I when the game
    ends there.
    """

    neighbors: tuple[tuple[int, ...], ...]
    payoffs: tuple[float | None, ...]

    @staticmethod
    def from_edges(
        num_nodes: int,
        edges: Iterable[tuple[int, int]],
        terminal_payoffs: Mapping[int, float],
    ) -> "GameGraph":
        if num_nodes < 1:
            raise ValueError("num_nodes must be positive")
        adj: list[set[int]] = [set() for _ in range(num_nodes)]
        for a, b in edges:
            if not (0 <= a < num_nodes and 0 <= b < num_nodes):
                raise ValueError(f"edge ({a},{b}) references an unknown node")
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            adj[a].add(b)
            adj[b].add(a)
        payoffs: list[float | None] = [None] * num_nodes
        for i, f in terminal_payoffs.items():
            if not 0 <= i < num_nodes:
                raise ValueError(f"terminal payoff for unknown node {i}")
            payoffs[i] = float(f)
        return GameGraph(tuple(tuple(sorted(s)) for s in adj), tuple(payoffs))

    @property
    def num_nodes(self) -> int:
        return len(self.neighbors)

    @cached_property
    def interior(self) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.payoffs) if f is None)

    @cached_property
    def terminal(self) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.payoffs) if f is not None)

    def is_terminal(self, i: int) -> bool:
        return self.payoffs[i] is not None

    def payoff_array(self) -> np.ndarray:
        """Payoffs as a float array with NaN at interior nodes."""
        return np.array(
            [np.nan if f is None else f for f in self.payoffs], dtype=np.float64
        )

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency in compressed (indptr, indices) form for the solver."""
        indptr = np.zeros(self.num_nodes + 1, dtype=np.int64)
        flat: list[int] = []
        for i, nbrs in enumerate(self.neighbors):
            flat.extend(nbrs)
            indptr[i + 1] = len(flat)
        return indptr, np.asarray(flat, dtype=np.int64)


@dataclass(frozen=True)
class GameSpec:
    """A complete discrete game: board plus the forced-move payment ``eps``.

    ``eps > 0`` is required for a playable game; construction does not raise
    so that :func:`validate` can report the violation.
    """

    graph: GameGraph
    eps: float


def build_segment(n: int, f0: float, fn1: float, eps: float) -> GameSpec:
    """Path board with ``n`` interior nodes and terminals at both ends.

    Nodes are 0..n+1 with edges {i, i+1}; node 0 pays ``f0`` and node n+1
    pays ``fn1``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not eps > 0:
        raise ValueError("eps must be positive")
    graph = GameGraph.from_edges(
        n + 2, [(i, i + 1) for i in range(n + 1)], {0: f0, n + 1: fn1}
    )
    return GameSpec(graph, float(eps))


def build_star(
    arm_lengths: Iterable[int], arm_payoffs: Iterable[float], eps: float
) -> GameSpec:
    """Star board: ``k`` path arms glued at a common interior hub (node 0).

    Arm ``i`` of length ``L`` contributes ``L - 1`` interior nodes and one
    terminal paying ``arm_payoffs[i]``; nodes are numbered hub first, then
    arm by arm outward.
    """
    lengths = [int(x) for x in arm_lengths]
    payoffs = [float(x) for x in arm_payoffs]
    if not eps > 0:
        raise ValueError("eps must be positive")
    if len(lengths) != len(payoffs):
        raise ValueError("arm_lengths and arm_payoffs must have equal length")
    if len(lengths) < 2:
        raise ValueError("a star needs at least two arms")
    if any(L < 1 for L in lengths):
        raise ValueError("every arm length must be >= 1")
    edges: list[tuple[int, int]] = []
    terminal_payoffs: dict[int, float] = {}
    next_id = 1
    for L, f in zip(lengths, payoffs):
        prev = 0
        for _ in range(L):
            edges.append((prev, next_id))
            prev = next_id
            next_id += 1
        terminal_payoffs[prev] = f
    graph = GameGraph.from_edges(next_id, edges, terminal_payoffs)
    return GameSpec(graph, float(eps))


def validate(spec: GameSpec) -> list[str]:
    """Report every violated board invariant; an empty list means valid."""
    g = spec.graph
    out: list[str] = []
    if not spec.eps > 0:
        out.append("eps must be positive")
    if not g.terminal:
        out.append("terminal set is empty")
    for i, nbrs in enumerate(g.neighbors):
        if i in nbrs:
            out.append(f"node {i} has a self-loop")
        for j in nbrs:
            if i not in g.neighbors[j]:
                out.append(f"adjacency not symmetric between {i} and {j}")
    for i in g.interior:
        if not g.neighbors[i]:
            out.append(f"interior node {i} has no neighbors")
    for i in g.terminal:
        f = g.payoffs[i]
        if f is None or not np.isfinite(f):
            out.append(f"terminal node {i} has a non-finite payoff")
    # every interior node must be able to end the game
    reached = set(g.terminal)
    frontier = list(g.terminal)
    while frontier:
        j = frontier.pop()
        for i in g.neighbors[j]:
            if i not in reached:
                reached.add(i)
                frontier.append(i)
    for i in g.interior:
        if i not in reached:
            out.append(f"interior node {i} unreachable from terminal set")
    return out


def require_valid(spec: GameSpec) -> None:
    """Raise ``ValidationError`` if the spec breaks any invariant."""
    violations = validate(spec)
    if violations:
        raise ValidationError(violations)


def spec_to_json(spec: GameSpec) -> dict:
    """Serialize to the interchange dict: epsilon, nodes, edges."""
    g = spec.graph
    nodes = []
    for i in range(g.num_nodes):
        rec: dict = {"id": i, "terminal": g.is_terminal(i)}
        if g.is_terminal(i):
            rec["payoff"] = g.payoffs[i]
        nodes.append(rec)
    edges = [
        [i, j] for i in range(g.num_nodes) for j in g.neighbors[i] if i < j
    ]
    return {"epsilon": spec.eps, "nodes": nodes, "edges": edges}


class SchemaError(ValueError):
    """Interchange dict does not match the documented graph format."""


def spec_from_json(obj: dict) -> GameSpec:
    """Parse the interchange dict produced by :func:`spec_to_json`.

    Raises ``SchemaError`` naming the offending key on malformed input;
    board invariants are *not* checked here (see :func:`validate`).
    """
    if not isinstance(obj, dict):
        raise SchemaError("top-level value must be an object")
    for key in ("epsilon", "nodes", "edges"):
        if key not in obj:
            raise SchemaError(f"missing key '{key}'")
    eps = obj["epsilon"]
    if not isinstance(eps, (int, float)) or isinstance(eps, bool):
        raise SchemaError("key 'epsilon' must be a number")
    nodes = obj["nodes"]
    if not isinstance(nodes, list):
        raise SchemaError("key 'nodes' must be an array")
    seen_ids: set[int] = set()
    payoffs: dict[int, float] = {}
    for rec in nodes:
        if not isinstance(rec, dict) or "id" not in rec or "terminal" not in rec:
            raise SchemaError("each node needs keys 'id' and 'terminal'")
        i = rec["id"]
        if not isinstance(i, int) or isinstance(i, bool):
            raise SchemaError("key 'id' must be an integer")
        if i in seen_ids:
            raise SchemaError(f"duplicate node id {i}")
        seen_ids.add(i)
        if rec["terminal"]:
            if "payoff" not in rec:
                raise SchemaError(f"terminal node {i} missing key 'payoff'")
            payoffs[i] = float(rec["payoff"])
        elif "payoff" in rec:
            raise SchemaError(f"interior node {i} must not carry key 'payoff'")
    n = len(nodes)
    if seen_ids != set(range(n)):
        raise SchemaError("node ids must be exactly 0..N-1")
    edges = obj["edges"]
    if not isinstance(edges, list):
        raise SchemaError("key 'edges' must be an array")
    parsed_edges = []
    for e in edges:
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)
        ):
            raise SchemaError("each edge must be a pair of integers")
        if not all(0 <= x < n for x in e):
            raise SchemaError(f"edge {e} references an unknown node")
        parsed_edges.append((e[0], e[1]))
    return GameSpec(GameGraph.from_edges(n, parsed_edges, payoffs), float(eps))
