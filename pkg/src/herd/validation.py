"""Input validation helpers, in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

from typing import Any, Iterable

from .model import FormatError, LinearSystem, Matrix, SignedDigraph, graph_to_sign_pattern

__all__ = ["check_matrix", "check_system", "check_state_set", "parse_index_list"]


def check_matrix(M: Any, *, name: str = "matrix", float_mode: bool = False) -> Matrix:
    """Coerce nested sequences, numpy arrays or a :class:`Matrix` to an exact Matrix."""
    if isinstance(M, Matrix):
        return M
    if hasattr(M, "tolist"):
        M = M.tolist()
    try:
        rows = list(M)
    except TypeError:
        raise ValueError(f"{name} must be a 2-d array-like") from None
    if rows and not all(isinstance(r, (list, tuple)) for r in rows):
        raise ValueError(f"{name} must be 2-d")
    try:
        return Matrix.from_rows(rows, float_mode=float_mode)
    except FormatError as exc:
        raise ValueError(f"{name}: {exc}") from None


def check_system(A: Any, B: Any = None, *, float_mode: bool = False) -> LinearSystem:
    """Accept ``(A, B)`` array-likes, a :class:`LinearSystem` or a :class:`SignedDigraph`."""
    if B is None:
        if isinstance(A, LinearSystem):
            return A
        if isinstance(A, SignedDigraph):
            return graph_to_sign_pattern(A)
        raise ValueError("B is required unless a LinearSystem or SignedDigraph is given")
    return LinearSystem(check_matrix(A, name="A", float_mode=float_mode),
                        check_matrix(B, name="B", float_mode=float_mode))


def check_state_set(X: Iterable[int], n: int, *, one_based: bool = False) -> tuple[int, ...]:
    """Validate a set of state indices and return them sorted and 0-based."""
    offset = 1 if one_based else 0
    out = set()
    for i in X:
        if isinstance(i, bool) or not hasattr(i, "__index__"):
            raise ValueError(f"state index {i!r} is not an integer")
        k = int(i) - offset
        if not 0 <= k < n:
            lo, hi = offset, n - 1 + offset
            raise ValueError(f"state index {i} outside {lo}..{hi}")
        out.add(k)
    if not out:
        raise ValueError("state set is empty")
    return tuple(sorted(out))


def parse_index_list(text: str) -> list[int]:
    """``"1,2, 3"`` -> ``[1, 2, 3]``."""
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"bad index list {text!r}; expected e.g. 1,2,3") from None
