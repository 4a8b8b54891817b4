"""Exact phase-1 simplex for ``M z >= 1`` with free ``z``.

Bland's rule over Fractions: terminates, deterministic. On infeasibility the
phase-1 duals give a Farkas vector ``y >= 0, y != 0, y^T M = 0``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

_ZERO = Fraction(0)
_ONE = Fraction(1)


def solve_geq_one(M: Sequence[Sequence[Fraction]]) -> tuple[bool, tuple[Fraction, ...]]:
    """Return ``(True, z)`` with ``M z >= 1`` or ``(False, y)`` a Farkas certificate."""
    r = len(M)
    if r == 0:
        raise ValueError("need at least one inequality")
    k = len(M[0])
    # columns: z+ [0,k), z- [k,2k), surplus [2k,2k+r), artificial [2k+r, 2k+2r)
    width = 2 * k + 2 * r
    art0 = 2 * k + r
    T = []
    for i, row in enumerate(M):
        row = [Fraction(v) for v in row]
        line = row + [-v for v in row] + [_ZERO] * (2 * r)
        line[2 * k + i] = -_ONE
        line[art0 + i] = _ONE
        T.append(line)
    rhs = [_ONE] * r
    basis = [art0 + i for i in range(r)]
    cost = [_ZERO] * width
    for j in range(width):
        if j < art0:
            cost[j] = -sum((T[i][j] for i in range(r)), _ZERO)

    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(r):
            a = T[i][enter]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            # phase-1 objective is bounded below by 0, so this cannot happen
            raise RuntimeError("unbounded phase-1 problem")
        _pivot(T, rhs, cost, leave, enter)
        basis[leave] = enter

    infeasibility = sum((rhs[i] for i in range(r) if basis[i] >= art0), _ZERO)
    if infeasibility == 0:
        z = [_ZERO] * (2 * k)
        for i, b in enumerate(basis):
            if b < 2 * k:
                z[b] = rhs[i]
        return True, tuple(z[j] - z[k + j] for j in range(k))
    y = [_ONE - cost[art0 + i] for i in range(r)]
    return False, primitive(y)


def _pivot(T, rhs, cost, p, q) -> None:
    row = T[p]
    piv = row[q]
    if piv != 1:
        T[p] = row = [v / piv for v in row]
        rhs[p] = rhs[p] / piv
    nz = [j for j, v in enumerate(row) if v]
    for i, other in enumerate(T):
        if i == p:
            continue
        f = other[q]
        if f:
            for j in nz:
                other[j] -= f * row[j]
            rhs[i] -= f * rhs[p]
    f = cost[q]
    if f:
        for j in nz:
            cost[j] -= f * row[j]


def primitive(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Positive multiple of ``v`` with coprime integer entries."""
    v = [Fraction(x) for x in v]
    if not any(v):
        return tuple(v)
    scale = math.lcm(*(x.denominator for x in v))
    ints = [int(x * scale) for x in v]
    g = math.gcd(*ints)
    return tuple(Fraction(x // g) for x in ints)
