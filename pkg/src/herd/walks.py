"""Signed reachability on a digraph: walk sets by sign and length, plain reachability,
and a brute-force walk enumerator used as an oracle."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .model import Node, SignedDigraph, Walk, input_node, state

__all__ = [
    "WalkSets",
    "ReachabilityReport",
    "compute_walk_sets",
    "reachability",
    "enumerate_walks",
    "ORACLE_LENGTH_CAP",
]

ORACLE_LENGTH_CAP = 12


@dataclass(frozen=True)
class WalkSets:
    """States reachable from each input by a positive / negative walk of each length.

    ``positive[j][d - 1]`` holds the 0-based state indices reached from input ``j``
    by at least one positive walk of length ``d``; ``negative`` likewise.
    """

    positive: tuple[tuple[frozenset[int], ...], ...]
    negative: tuple[tuple[frozenset[int], ...], ...]
    depth_bound: int
    edge_visits: int = field(default=0, compare=False)

    @property
    def n_inputs(self) -> int:
        return len(self.positive)

    def P(self, j: int, d: int) -> frozenset[int]:
        self._check(d)
        return self.positive[j][d - 1]

    def N(self, j: int, d: int) -> frozenset[int]:
        self._check(d)
        return self.negative[j][d - 1]

    def _check(self, d: int) -> None:
        if not 1 <= d <= self.depth_bound:
            raise IndexError(f"depth {d} outside 1..{self.depth_bound}")

    def layers(self):
        """Yield ``(j, d, P, N)`` for every input and depth."""
        for j in range(self.n_inputs):
            for d in range(1, self.depth_bound + 1):
                yield j, d, self.positive[j][d - 1], self.negative[j][d - 1]


@dataclass(frozen=True)
class ReachabilityReport:
    reachable: tuple[frozenset[int], ...]
    n_states: int

    @property
    def input_connectable(self) -> bool:
        covered = frozenset().union(*self.reachable)
        return len(covered) == self.n_states

    @property
    def unreached(self) -> frozenset[int]:
        return frozenset(range(self.n_states)) - frozenset().union(*self.reachable)


def compute_walk_sets(g: SignedDigraph, depth_bound: int | None = None) -> WalkSets:
    """Layered BFS over ``(state, sign)`` pairs.

    Layer 1 comes straight from the input edges; layer ``d + 1`` pushes every
    pair of layer ``d`` through the state edges, multiplying signs. Weights are
    never consulted.
    """
    if depth_bound is None:
        depth_bound = g.n_states
    if not isinstance(depth_bound, int) or depth_bound < 1:
        raise ValueError(f"depth_bound must be a positive integer, got {depth_bound!r}")

    visits = 0
    pos_all, neg_all = [], []
    for j in range(g.n_inputs):
        layer = set()
        for e in g.out_edges(input_node(j)):
            layer.add((e.target.index, e.sign))
            visits += 1
        pos_layers, neg_layers = [], []
        for d in range(1, depth_bound + 1):
            if d > 1:
                # each edge is relaxed at most once per sign of its source
                nxt = set()
                for i, s in layer:
                    for e in g.out_edges(state(i)):
                        nxt.add((e.target.index, s * e.sign))
                        visits += 1
                layer = nxt
            pos_layers.append(frozenset(i for i, s in layer if s > 0))
            neg_layers.append(frozenset(i for i, s in layer if s < 0))
        pos_all.append(tuple(pos_layers))
        neg_all.append(tuple(neg_layers))
    return WalkSets(tuple(pos_all), tuple(neg_all), depth_bound, visits)


def reachability(g: SignedDigraph) -> ReachabilityReport:
    reached = []
    for j in range(g.n_inputs):
        seen: set[int] = set()
        queue = deque(e.target.index for e in g.out_edges(input_node(j)))
        seen.update(queue)
        while queue:
            i = queue.popleft()
            for e in g.out_edges(state(i)):
                if e.target.index not in seen:
                    seen.add(e.target.index)
                    queue.append(e.target.index)
        reached.append(frozenset(seen))
    return ReachabilityReport(tuple(reached), g.n_states)


def enumerate_walks(g: SignedDigraph, source: Node, target: Node, length: int,
                    *, cap: int = ORACLE_LENGTH_CAP) -> list[Walk]:
    """Every walk of exactly ``length`` edges from ``source`` to ``target``.

    Exponential in ``length``; refuses lengths above ``cap``. Results are sorted
    by their node sequence.
    """
    if length < 1:
        raise ValueError("walk length must be at least 1")
    if length > cap:
        raise ValueError(f"walk length {length} exceeds oracle cap {cap}")
    found: list[Walk] = []
    path = []

    def extend(node: Node, remaining: int) -> None:
        if remaining == 0:
            if node == target:
                found.append(Walk.from_edges(path))
            return
        for e in g.out_edges(node):
            path.append(e)
            extend(e.target, remaining - 1)
            path.pop()

    extend(source, length)
    found.sort(key=lambda w: w.nodes)
    return found
