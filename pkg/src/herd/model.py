"""Core value types: exact matrices, linear systems, signed digraphs and walks.

All scalars are :class:`fractions.Fraction`. Node ids are ``Node(kind, index)``
pairs with a 0-based ``index``; their external labels are 1-based (``"x1"``,
``"u2"``).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Integral, Rational as _RationalABC
from typing import Any, Iterable, NamedTuple, Sequence

__all__ = [
    "Rational",
    "FormatError",
    "to_rational",
    "sgn",
    "format_rational",
    "Matrix",
    "LinearSystem",
    "Node",
    "state",
    "input_node",
    "parse_node",
    "Edge",
    "SignedDigraph",
    "Walk",
    "system_to_graph",
    "graph_to_sign_pattern",
    "restrict_to_input",
    "system_from_dict",
    "system_to_dict",
    "graph_from_dict",
    "graph_to_dict",
    "loads_model",
    "load_model",
]

Rational = Fraction

FLOAT_SIGN_CUTOFF = 1e-9

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


class FormatError(ValueError):
    """Raised when a system or graph description cannot be parsed."""


def to_rational(value: Any, *, float_mode: bool = False) -> Fraction:
    """Convert ``value`` to an exact rational.

    Accepts ints, Fractions, strings ``"p"`` / ``"-p/q"``, and integral floats.
    Non-integral floats are rejected unless ``float_mode`` is set, in which case
    they are rounded through their shortest decimal repr and magnitudes below
    ``FLOAT_SIGN_CUTOFF`` snap to zero.
    """
    if isinstance(value, bool):
        raise FormatError(f"boolean is not a valid scalar: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (Integral, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        if _RATIONAL_RE.match(value):
            try:
                return Fraction(value.replace(" ", ""))
            except ZeroDivisionError:
                raise FormatError(f"zero denominator in {value!r}") from None
        if float_mode:
            try:
                return to_rational(float(value), float_mode=True)
            except ValueError:
                pass
        raise FormatError(f"not an exact rational: {value!r}")
    if hasattr(value, "item") and not isinstance(value, (list, tuple)):
        # numpy scalar
        return to_rational(value.item(), float_mode=float_mode)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise FormatError(f"non-finite scalar: {value!r}")
        if value.is_integer():
            return Fraction(int(value))
        if float_mode:
            if abs(value) < FLOAT_SIGN_CUTOFF:
                return Fraction(0)
            return Fraction(repr(value))
        raise FormatError(f"non-integral float {value!r} rejected in exact mode")
    raise FormatError(f"unsupported scalar type {type(value).__name__}")


def sgn(x: Fraction | int) -> int:
    return (x > 0) - (x < 0)


def format_rational(x: Fraction) -> str:
    """Canonical string form: ``"3"``, ``"-3/2"``."""
    return str(Fraction(x))


@dataclass(frozen=True)
class Matrix:
    """Dense exact matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )
        object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], *, float_mode: bool = False) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            raise FormatError("matrix must have at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise FormatError("ragged matrix rows")
        entries = tuple(to_rational(v, float_mode=float_mode) for r in rows for v in r)
        return cls(len(rows), width, entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index {ij} out of range for shape {self.shape}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def hstack(self, other: "Matrix") -> "Matrix":
        if other.rows != self.rows:
            raise ValueError("row counts differ")
        return Matrix.from_rows([self.row(i) + other.row(i) for i in range(self.rows)])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        other_cols = [other.col(j) for j in range(other.cols)]
        for i in range(self.rows):
            r = self.row(i)
            nz = [(k, a) for k, a in enumerate(r) if a]
            for c in other_cols:
                out.append(sum((a * c[k] for k, a in nz), Fraction(0)))
        return Matrix(self.rows, other.cols, tuple(out))

    def matvec(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(
            sum((a * b for a, b in zip(self.row(i), v) if a and b), Fraction(0))
            for i in range(self.rows)
        )

    def nnz(self) -> int:
        return sum(1 for e in self.entries if e)

    def to_float(self):
        import numpy as np

        return np.array([[float(e) for e in self.row(i)] for i in range(self.rows)],
                        dtype=float).reshape(self.rows, self.cols)

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(e) for e in self.row(i)] for i in range(self.rows)]


@dataclass(frozen=True)
class LinearSystem:
    """Continuous-time system ``x' = A x + B u`` with exact coefficients."""

    A: Matrix
    B: Matrix

    def __post_init__(self):
        if self.A.rows != self.A.cols or self.A.rows < 1:
            raise ValueError(f"A must be square and non-empty, got {self.A.shape}")
        if self.B.rows != self.A.rows:
            raise ValueError(f"B has {self.B.rows} rows, expected {self.A.rows}")
        if self.B.cols < 1:
            raise ValueError("B must have at least one column")

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def m(self) -> int:
        return self.B.cols

    @classmethod
    def from_arrays(cls, A, B, *, float_mode: bool = False) -> "LinearSystem":
        return cls(Matrix.from_rows(A, float_mode=float_mode),
                   Matrix.from_rows(B, float_mode=float_mode))


class Node(NamedTuple):
    kind: str  # "u" for inputs, "x" for states
    index: int  # 0-based

    @property
    def label(self) -> str:
        return f"{self.kind}{self.index + 1}"

    @property
    def is_input(self) -> bool:
        return self.kind == "u"

    def __str__(self) -> str:
        return self.label


def state(i: int) -> Node:
    return Node("x", i)


def input_node(j: int) -> Node:
    return Node("u", j)


_NODE_RE = re.compile(r"^([ux])([1-9]\d*)$")


def parse_node(label: str) -> Node:
    """Parse an external 1-based label such as ``"x3"`` or ``"u1"``."""
    match = _NODE_RE.match(str(label).strip())
    if not match:
        raise FormatError(f"bad node id {label!r}; expected 'x<k>' or 'u<k>'")
    return Node(match.group(1), int(match.group(2)) - 1)


class Edge(NamedTuple):
    source: Node
    target: Node
    sign: int
    weight: Fraction | None = None


@dataclass(frozen=True)
class SignedDigraph:
    """Signed (optionally weighted) digraph over state and input nodes.

    An edge ``x_i -> x_j`` mirrors the entry ``A[j, i]``; an edge ``u_i -> x_j``
    mirrors ``B[j, i]``.
    """

    n_states: int
    n_inputs: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.n_states < 1 or self.n_inputs < 1:
            raise ValueError("graph needs at least one state and one input")
        seen = set()
        clean = []
        for e in self.edges:
            src, dst, s, w = Edge(*e)
            src, dst = Node(*src), Node(*dst)
            if dst.is_input:
                raise ValueError(f"edge {src}->{dst} targets an input node")
            self._check_node(src)
            self._check_node(dst)
            if s not in (1, -1):
                raise ValueError(f"edge {src}->{dst} has sign {s!r}, expected +1 or -1")
            if w is not None:
                w = Fraction(w)
                if w == 0:
                    raise ValueError(f"edge {src}->{dst} has zero weight")
                if sgn(w) != s:
                    raise ValueError(f"edge {src}->{dst}: sign {s} disagrees with weight {w}")
            if (src, dst) in seen:
                raise ValueError(f"duplicate edge {src}->{dst}")
            seen.add((src, dst))
            clean.append(Edge(src, dst, int(s), w))
        object.__setattr__(self, "edges", tuple(sorted(clean, key=lambda e: (e.source, e.target))))

    def _check_node(self, node: Node) -> None:
        bound = self.n_inputs if node.is_input else self.n_states
        if node.kind not in ("u", "x") or not 0 <= node.index < bound:
            raise ValueError(f"node {node} out of range")

    @cached_property
    def weighted(self) -> bool:
        """True when every edge carries a weight (vacuously true with no edges)."""
        return all(e.weight is not None for e in self.edges)

    @cached_property
    def successors(self) -> dict[Node, tuple[Edge, ...]]:
        out: dict[Node, list[Edge]] = {}
        for e in self.edges:
            out.setdefault(e.source, []).append(e)
        return {k: tuple(v) for k, v in out.items()}

    def out_edges(self, node: Node) -> tuple[Edge, ...]:
        return self.successors.get(node, ())

    @cached_property
    def in_degree(self) -> tuple[int, ...]:
        deg = [0] * self.n_states
        for e in self.edges:
            deg[e.target.index] += 1
        return tuple(deg)

    @property
    def state_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if not e.source.is_input)

    @property
    def input_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.source.is_input)

    @classmethod
    def from_edges(cls, n_states: int, n_inputs: int,
                   edges: Iterable[tuple[str, str, Any]]) -> "SignedDigraph":
        """Build from ``(source_label, target_label, sign_or_weight)`` triples.

        An int of +1/-1 is a sign; anything else (Fraction, str) is a weight.
        """
        out = []
        for src, dst, val in edges:
            if isinstance(val, int) and not isinstance(val, bool) and val in (1, -1):
                out.append(Edge(parse_node(src), parse_node(dst), val, None))
            else:
                w = to_rational(val)
                out.append(Edge(parse_node(src), parse_node(dst), sgn(w), w))
        return cls(n_states, n_inputs, tuple(out))


@dataclass(frozen=True)
class Walk:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    sign: int
    weight: Fraction | None = None

    def __post_init__(self):
        if len(self.nodes) != len(self.edges) + 1:
            raise ValueError("a walk has one more node than edges")

    @property
    def length(self) -> int:
        return len(self.edges)

    def concat(self, other: "Walk") -> "Walk":
        if self.nodes[-1] != other.nodes[0]:
            raise ValueError("walks do not meet")
        weight = None
        if self.weight is not None and other.weight is not None:
            weight = self.weight * other.weight
        return Walk(self.nodes + other.nodes[1:], self.edges + other.edges,
                    self.sign * other.sign, weight)

    @classmethod
    def from_edges(cls, edges: Sequence[Edge]) -> "Walk":
        if not edges:
            raise ValueError("use a single node for an empty walk")
        s = 1
        w: Fraction | None = Fraction(1)
        for e in edges:
            s *= e.sign
            w = None if (w is None or e.weight is None) else w * e.weight
        nodes = (edges[0].source,) + tuple(e.target for e in edges)
        return cls(nodes, tuple(edges), s, w)


def system_to_graph(sys: LinearSystem) -> SignedDigraph:
    edges = []
    for j in range(sys.n):
        for i in range(sys.n):
            a = sys.A[j, i]
            if a:
                edges.append(Edge(state(i), state(j), sgn(a), a))
        for i in range(sys.m):
            b = sys.B[j, i]
            if b:
                edges.append(Edge(input_node(i), state(j), sgn(b), b))
    return SignedDigraph(sys.n, sys.m, tuple(edges))


def graph_to_sign_pattern(g: SignedDigraph, use_weights: bool | None = None) -> LinearSystem:
    """Canonical system of a graph: signs as entries, or weights if the graph has them.

    ``use_weights=None`` uses weights exactly when every edge is weighted.
    """
    if use_weights is None:
        use_weights = g.weighted
    if use_weights and not g.weighted:
        raise ValueError("graph has unweighted edges")
    A = [[Fraction(0)] * g.n_states for _ in range(g.n_states)]
    B = [[Fraction(0)] * g.n_inputs for _ in range(g.n_states)]
    for e in g.edges:
        val = e.weight if use_weights else Fraction(e.sign)
        target = B if e.source.is_input else A
        target[e.target.index][e.source.index] = val
    return LinearSystem(Matrix.from_rows(A), Matrix.from_rows(B))


def restrict_to_input(g: SignedDigraph, j: int) -> SignedDigraph:
    """Subgraph keeping only input ``j`` (0-based), renumbered as ``u1``."""
    if not 0 <= j < g.n_inputs:
        raise ValueError(f"input index {j} out of range")
    edges = []
    for e in g.edges:
        if e.source.is_input:
            if e.source.index != j:
                continue
            e = e._replace(source=input_node(0))
        edges.append(e)
    return SignedDigraph(g.n_states, 1, tuple(edges))


# --- JSON formats ---------------------------------------------------------

def system_from_dict(data: dict, *, float_mode: bool = False) -> LinearSystem:
    try:
        A, B = data["A"], data["B"]
    except (KeyError, TypeError):
        raise FormatError("system JSON needs keys 'A' and 'B'") from None
    if not isinstance(A, list) or not all(isinstance(r, list) for r in A):
        raise FormatError("'A' must be a list of rows")
    if not isinstance(B, list) or not all(isinstance(r, list) for r in B):
        raise FormatError("'B' must be a list of rows")
    try:
        return LinearSystem(Matrix.from_rows(A, float_mode=float_mode),
                            Matrix.from_rows(B, float_mode=float_mode))
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def system_to_dict(sys: LinearSystem) -> dict:
    return {"A": sys.A.to_strings(), "B": sys.B.to_strings()}


def graph_from_dict(data: dict, *, float_mode: bool = False) -> SignedDigraph:
    try:
        n, m, raw = data["n"], data["m"], data["edges"]
    except (KeyError, TypeError):
        raise FormatError("graph JSON needs keys 'n', 'm' and 'edges'") from None
    if not isinstance(n, int) or not isinstance(m, int) or isinstance(n, bool):
        raise FormatError("'n' and 'm' must be integers")
    if not isinstance(raw, list):
        raise FormatError("'edges' must be a list")
    edges = []
    for k, item in enumerate(raw):
        if not isinstance(item, dict) or "from" not in item or "to" not in item:
            raise FormatError(f"edge #{k} needs 'from' and 'to'")
        weight = item.get("weight")
        if weight is not None:
            weight = to_rational(weight, float_mode=float_mode)
        sign = item.get("sign")
        if sign is None:
            if weight is None:
                raise FormatError(f"edge #{k} needs 'sign' or 'weight'")
            sign = sgn(weight)
        if sign not in (1, -1) or isinstance(sign, bool):
            raise FormatError(f"edge #{k}: sign must be 1 or -1")
        edges.append(Edge(parse_node(item["from"]), parse_node(item["to"]), int(sign), weight))
    try:
        return SignedDigraph(n, m, tuple(edges))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def graph_to_dict(g: SignedDigraph) -> dict:
    edges = []
    for e in g.edges:
        item: dict[str, Any] = {"from": e.source.label, "to": e.target.label, "sign": e.sign}
        if e.weight is not None:
            item["weight"] = format_rational(e.weight)
        edges.append(item)
    return {"n": g.n_states, "m": g.n_inputs, "edges": edges}


def loads_model(text: str, *, float_mode: bool = False) -> LinearSystem | SignedDigraph:
    """Parse system or graph JSON, detected by its keys."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if isinstance(data, dict) and "A" in data:
        return system_from_dict(data, float_mode=float_mode)
    if isinstance(data, dict) and "edges" in data:
        return graph_from_dict(data, float_mode=float_mode)
    raise FormatError("JSON is neither a system ({'A','B'}) nor a graph ({'n','m','edges'})")


def load_model(path, *, float_mode: bool = False) -> LinearSystem | SignedDigraph:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read(), float_mode=float_mode)
