from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from herd._simplex import primitive, solve_geq_one


def _check(M, feasible, vec):
    if feasible:
        assert all(sum(a * z for a, z in zip(row, vec)) >= 1 for row in M)
    else:
        assert all(y >= 0 for y in vec) and any(vec)
        assert all(sum(y * M[i][j] for i, y in enumerate(vec)) == 0 for j in range(len(M[0])))


def test_single_positive_row():
    ok, z = solve_geq_one([[Fraction(2)]])
    assert ok and z == (Fraction(1, 2),)


def test_opposed_rows():
    ok, y = solve_geq_one([[Fraction(-1)], [Fraction(1)]])
    assert not ok and y == (1, 1)


def test_zero_row():
    ok, y = solve_geq_one([[Fraction(0), Fraction(0)], [Fraction(1), Fraction(0)]])
    assert not ok
    _check([[0, 0], [1, 0]], ok, y)


def test_primitive():
    assert primitive([Fraction(1, 2), Fraction(3, 4)]) == (2, 3)


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_agrees_with_scipy_and_certifies(rows):
    M = [[Fraction(v) for v in r] for r in rows]
    ok, vec = solve_geq_one(M)
    _check(M, ok, vec)
    k = len(rows[0])
    res = linprog(np.zeros(k), A_ub=-np.array(rows, dtype=float), b_ub=-np.ones(len(rows)),
                  bounds=[(None, None)] * k, method="highs")
    assert ok == (res.status == 0)
