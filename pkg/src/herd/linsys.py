"""Exact linear algebra: controllability matrix, walk-weight tables, column-space
basis via fraction-free elimination, and positivity of a system."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from .model import LinearSystem, Matrix, input_node, state, system_to_graph
from .walks import ORACLE_LENGTH_CAP, enumerate_walks

__all__ = [
    "ControllabilityMatrix",
    "WalkWeightTable",
    "RangeBasis",
    "controllability_matrix",
    "rho_table",
    "range_basis",
    "rank",
    "is_positive_system",
]


@dataclass(frozen=True)
class ControllabilityMatrix:
    """``[B, AB, ..., A^(n-1) B]`` with its block structure kept explicit."""

    C: Matrix
    n: int
    m: int

    def block(self, d: int) -> Matrix:
        """Block ``d`` (1-based), i.e. ``A^(d-1) B``."""
        if not 1 <= d <= self.n:
            raise IndexError(f"block {d} outside 1..{self.n}")
        lo = self.m * (d - 1)
        return Matrix.from_rows([self.C.row(i)[lo:lo + self.m] for i in range(self.n)])

    def rho(self, j: int, i: int, d: int) -> Fraction:
        """Total weight of length-``d`` walks from input ``j`` to state ``i`` (0-based)."""
        return self.C[i, self.m * (d - 1) + j]

    def column_of(self, j: int, d: int) -> int:
        return self.m * (d - 1) + j

    def depth_of(self, col: int) -> tuple[int, int]:
        """Inverse of :meth:`column_of`: ``(input, depth)``."""
        return col % self.m, col // self.m + 1

    @property
    def ncols(self) -> int:
        return self.C.cols

    def rows(self, X: Sequence[int]) -> list[tuple[Fraction, ...]]:
        return [self.C.row(i) for i in X]

    @cached_property
    def range(self) -> "RangeBasis":
        return range_basis(self)


@dataclass(frozen=True)
class WalkWeightTable:
    """``rho[j][i][d-1]`` plus optional per-sign splits from walk enumeration."""

    rho: tuple[tuple[tuple[Fraction, ...], ...], ...]
    rho_plus: tuple[tuple[tuple[Fraction, ...], ...], ...] | None = None
    rho_minus: tuple[tuple[tuple[Fraction, ...], ...], ...] | None = None

    def __call__(self, j: int, i: int, d: int) -> Fraction:
        return self.rho[j][i][d - 1]


@dataclass(frozen=True)
class RangeBasis:
    basis: tuple[tuple[Fraction, ...], ...]
    rank: int
    pivot_columns: tuple[int, ...]


def controllability_matrix(sys: LinearSystem) -> ControllabilityMatrix:
    blocks = [sys.B]
    for _ in range(1, sys.n):
        blocks.append(sys.A @ blocks[-1])
    rows = [sum((blk.row(i) for blk in blocks), ()) for i in range(sys.n)]
    return ControllabilityMatrix(Matrix(sys.n, sys.n * sys.m, tuple(e for r in rows for e in r)),
                                 sys.n, sys.m)


def rho_table(sys: LinearSystem, *, split: bool = False,
              cap: int = ORACLE_LENGTH_CAP) -> WalkWeightTable:
    """Walk weights read off the controllability matrix.

    With ``split=True`` the positive and negative parts are summed from an
    explicit walk enumeration, which is exponential; depth must stay within ``cap``.
    """
    cm = controllability_matrix(sys)
    n, m = sys.n, sys.m
    rho = tuple(tuple(tuple(cm.rho(j, i, d) for d in range(1, n + 1)) for i in range(n))
                for j in range(m))
    if not split:
        return WalkWeightTable(rho)
    if n > cap:
        raise ValueError(f"signed split needs walks of length {n} > oracle cap {cap}")
    g = system_to_graph(sys)
    plus, minus = [], []
    for j in range(m):
        pj, mj = [], []
        for i in range(n):
            pji, mji = [], []
            for d in range(1, n + 1):
                walks = enumerate_walks(g, input_node(j), state(i), d, cap=cap)
                pji.append(sum((w.weight for w in walks if w.sign > 0), Fraction(0)))
                mji.append(sum((w.weight for w in walks if w.sign < 0), Fraction(0)))
            pj.append(tuple(pji))
            mj.append(tuple(mji))
        plus.append(tuple(pj))
        minus.append(tuple(mj))
    return WalkWeightTable(rho, tuple(plus), tuple(minus))


def _pivot_columns(rows: list[list[Fraction]]) -> list[int]:
    """Pivot columns of a rational matrix by Bareiss elimination on integers."""
    M = []
    for r in rows:
        scale = math.lcm(*(e.denominator for e in r)) if r else 1
        M.append([int(e * scale) for e in r])
    nrows = len(M)
    ncols = len(M[0]) if M else 0
    pivots = []
    prev = 1
    top = 0
    for col in range(ncols):
        if top == nrows:
            break
        p = next((i for i in range(top, nrows) if M[i][col]), None)
        if p is None:
            continue
        M[top], M[p] = M[p], M[top]
        piv = M[top][col]
        for i in range(top + 1, nrows):
            lead = M[i][col]
            Mi, Mt = M[i], M[top]
            for k in range(col + 1, ncols):
                Mi[k] = (Mi[k] * piv - lead * Mt[k]) // prev
            Mi[col] = 0
        prev = piv
        pivots.append(col)
        top += 1
    return pivots


def range_basis(C: ControllabilityMatrix | Matrix) -> RangeBasis:
    """Column-space basis made of original columns of ``C``."""
    mat = C.C if isinstance(C, ControllabilityMatrix) else C
    pivots = _pivot_columns(mat.to_rows())
    basis = tuple(mat.col(j) for j in pivots)
    return RangeBasis(basis, len(pivots), tuple(pivots))


def rank(M: ControllabilityMatrix | Matrix) -> int:
    return range_basis(M).rank


def is_positive_system(sys: LinearSystem) -> bool:
    """Metzler ``A`` (off-diagonal entries >= 0) and entrywise non-negative ``B``."""
    n = sys.n
    metzler = all(sys.A[i, j] >= 0 for i in range(n) for j in range(n) if i != j)
    return metzler and all(b >= 0 for b in sys.B.entries)
