"""Herdability verdicts.

Set herdability is decided exactly: ``X`` is herdable iff some ``k`` in the column
space of the controllability matrix is positive on ``X``. Since that space is a
subspace, positivity can be normalised to ``k_i >= 1``, which is a linear
feasibility problem with a Farkas certificate when it fails. The structural
tests (unisigned columns, sign herdability, positive systems, out-branchings)
live alongside.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._simplex import solve_geq_one
from .linsys import ControllabilityMatrix, is_positive_system
from .model import LinearSystem, SignedDigraph, input_node, sgn, state, system_to_graph
from .walks import compute_walk_sets, reachability

__all__ = [
    "HerdabilityVerdict",
    "SignHerdabilityReport",
    "BranchingAnalysis",
    "FAMILY_CAP",
    "herdable_states",
    "check_set",
    "completely_herdable",
    "unisigned_sufficient",
    "unisigned_witness",
    "sign_herdable",
    "positive_system_verdict",
    "analyze_branching",
]

FAMILY_CAP = 4096


@dataclass(frozen=True)
class HerdabilityVerdict:
    """Outcome of a herdability query on a 0-based state set.

    ``witness`` is a combination ``alpha`` of the columns of ``C`` with
    ``(C alpha)_i >= 1`` on the set; ``certificate`` is ``y >= 0, y != 0`` with
    ``y^T C_X = 0``, ordered like ``query_set``.
    """

    query_set: tuple[int, ...]
    herdable: bool
    witness: tuple[Fraction, ...] | None = None
    certificate: tuple[Fraction, ...] | None = None

    def validate(self, C: ControllabilityMatrix) -> bool:
        """Re-check the witness or certificate in exact arithmetic."""
        if self.herdable:
            if self.witness is None:
                return False
            k = C.C.matvec(self.witness)
            return all(k[i] >= 1 for i in self.query_set)
        y = self.certificate
        if y is None or len(y) != len(self.query_set):
            return False
        if any(v < 0 for v in y) or not any(y):
            return False
        return all(
            sum((y[a] * C.C[i, col] for a, i in enumerate(self.query_set)), Fraction(0)) == 0
            for col in range(C.ncols)
        )


@dataclass(frozen=True)
class SignHerdabilityReport:
    completely_sign_herdable: bool
    assignment: dict[int, tuple[int, int]]  # state -> (input, depth)
    uncovered: frozenset[int]


@dataclass(frozen=True)
class BranchingAnalysis:
    is_out_branching: bool
    root_input: int = 0
    d_max: int | None = None
    layers: tuple[tuple[frozenset[int], frozenset[int]], ...] | None = None  # (P_d, N_d)
    families: tuple[frozenset[int], ...] | None = None
    families_truncated: bool = False
    maximal_families: tuple[frozenset[int], ...] | None = None
    max_herdable_size: int | None = None
    k_walk_size: int | None = None
    depth: tuple[int, ...] | None = None  # walk length from the root to each state

    def admits(self, X: Iterable[int]) -> bool:
        """Whether ``X`` is contained in one of the herdable families.

        That holds exactly when, depth by depth, ``X`` stays inside ``P_d`` or
        inside ``N_d``. Does not need the (possibly truncated) family list.
        """
        if not self.is_out_branching:
            raise ValueError("not an out-branching")
        X = frozenset(X)
        for d, (P, N) in enumerate(self.layers, start=1):
            part = {i for i in X if self.depth[i] == d}
            if part and not (part <= P or part <= N):
                return False
        return True


def _check_query(C: ControllabilityMatrix, X: Iterable[int]) -> tuple[int, ...]:
    X = tuple(sorted(set(X)))
    if not X:
        raise ValueError("query set is empty")
    bad = [i for i in X if not (isinstance(i, int) and 0 <= i < C.n)]
    if bad:
        raise ValueError(f"state indices {bad} outside 0..{C.n - 1}")
    return X


def herdable_states(C: ControllabilityMatrix) -> frozenset[int]:
    """States with a nonzero row in ``C``; exactly the individually herdable ones."""
    return frozenset(i for i in range(C.n) if any(C.C.row(i)))


def check_set(C: ControllabilityMatrix, X: Iterable[int]) -> HerdabilityVerdict:
    """Decide whether the 0-based state set ``X`` is herdable.

    Solves ``(C alpha)_i >= 1`` for ``i`` in ``X`` over a column basis of ``C``
    with an exact Bland-rule phase-1 simplex. No threshold enters: any strict
    witness can be rescaled past any threshold.
    """
    X = _check_query(C, X)
    basis = C.range
    if basis.rank == 0:
        # C = 0: every row is zero, y = e_1 certifies
        y = (Fraction(1),) + (Fraction(0),) * (len(X) - 1)
        return HerdabilityVerdict(X, False, certificate=y)
    M = [[C.C[i, col] for col in basis.pivot_columns] for i in X]
    feasible, vec = solve_geq_one(M)
    if feasible:
        alpha = [Fraction(0)] * C.ncols
        for col, v in zip(basis.pivot_columns, vec):
            alpha[col] = v
        return HerdabilityVerdict(X, True, witness=tuple(alpha))
    return HerdabilityVerdict(X, False, certificate=vec)


def completely_herdable(C: ControllabilityMatrix) -> HerdabilityVerdict:
    return check_set(C, range(C.n))


def _unisigned(col: Sequence[Fraction]) -> int:
    """Sign of a unisigned nonzero vector, 0 if mixed or zero."""
    signs = {sgn(v) for v in col if v}
    return signs.pop() if len(signs) == 1 else 0


def unisigned_sufficient(C: ControllabilityMatrix) -> dict[int, int] | None:
    """Assign each state the first unisigned column that is nonzero on it.

    Returns ``None`` if some state has no such column. A full assignment proves
    complete herdability; its absence proves nothing.
    """
    signs = [_unisigned(C.C.col(j)) for j in range(C.ncols)]
    out = {}
    for i in range(C.n):
        j = next((j for j in range(C.ncols) if signs[j] and C.C[i, j]), None)
        if j is None:
            return None
        out[i] = j
    return out


def unisigned_witness(C: ControllabilityMatrix, assignment: dict[int, int]) -> tuple[Fraction, ...]:
    """Combination of the assigned columns, each taken with its own sign, scaled so
    that every entry of ``C alpha`` is at least 1."""
    alpha = [Fraction(0)] * C.ncols
    for j in set(assignment.values()):
        alpha[j] = Fraction(_unisigned(C.C.col(j)))
    k = C.C.matvec(alpha)
    low = min(k[i] for i in assignment)
    if low < 1:
        alpha = [a / low for a in alpha]
    return tuple(alpha)


def sign_herdable(g: SignedDigraph, depth_bound: int | None = None) -> SignHerdabilityReport:
    """Sufficient sign-pattern test for complete herdability.

    A state is covered by ``(j, d)`` when it lies in ``P_d^j`` or ``N_d^j`` and
    exactly one of those two sets is empty. If every state is covered, every
    system with this sign pattern is completely herdable.
    """
    ws = compute_walk_sets(g, depth_bound if depth_bound is not None else g.n_states)
    assignment: dict[int, tuple[int, int]] = {}
    for d in range(1, ws.depth_bound + 1):
        for j in range(g.n_inputs):
            P, N = ws.P(j, d), ws.N(j, d)
            if bool(P) == bool(N):
                continue
            for i in P | N:
                assignment.setdefault(i, (j, d))
    uncovered = frozenset(range(g.n_states)) - assignment.keys()
    return SignHerdabilityReport(not uncovered, dict(sorted(assignment.items())), uncovered)


def positive_system_verdict(sys: LinearSystem, *, C: ControllabilityMatrix | None = None,
                            with_witness: bool = False) -> HerdabilityVerdict:
    """Complete herdability of a positive system from input connectability alone.

    Raises ``ValueError`` on a non-positive system, where the shortcut is unsound.
    An unreached state has a zero row in ``C``, so a unit vector on it is returned
    as certificate. A witness for the herdable case is only computed (via
    :func:`check_set`) when ``with_witness`` is set.
    """
    if not is_positive_system(sys):
        raise ValueError("positive_system_verdict requires Metzler A and non-negative B")
    report = reachability(system_to_graph(sys))
    X = tuple(range(sys.n))
    if not report.input_connectable:
        i = min(report.unreached)
        return HerdabilityVerdict(X, False, certificate=tuple(Fraction(int(k == i)) for k in X))
    if with_witness:
        from .linsys import controllability_matrix

        verdict = check_set(C if C is not None else controllability_matrix(sys), X)
        if not verdict.herdable:
            raise RuntimeError("LP contradicts input connectability on a positive system")
        return verdict
    return HerdabilityVerdict(X, True)


def analyze_branching(g: SignedDigraph) -> BranchingAnalysis:
    """Herdable families of a single-input, input-rooted out-branching.

    Each state must have exactly one incoming edge and be reachable from the input;
    then every state has a unique walk from the input, at a well-defined depth,
    and a set is herdable iff per depth it picks only ``P_d`` or only ``N_d``
    nodes.
    """
    if g.n_inputs != 1:
        raise ValueError(f"branching analysis needs exactly one input, got {g.n_inputs}")
    if any(deg != 1 for deg in g.in_degree):
        return BranchingAnalysis(False)
    depth = [0] * g.n_states
    frontier = [e.target.index for e in g.out_edges(input_node(0))]
    for i in frontier:
        depth[i] = 1
    while frontier:
        nxt = []
        for i in frontier:
            for e in g.out_edges(state(i)):
                if depth[e.target.index]:
                    # reached twice: only possible through a cycle back into the tree
                    return BranchingAnalysis(False)
                depth[e.target.index] = depth[i] + 1
                nxt.append(e.target.index)
        frontier = nxt
    if not all(depth):
        return BranchingAnalysis(False)

    d_max = max(depth)
    ws = compute_walk_sets(g, d_max)
    layers = tuple((ws.P(0, d), ws.N(0, d)) for d in range(1, d_max + 1))

    choices = []
    maximal_choices = []
    for P, N in layers:
        options = [s for s in (P, N) if s]
        maximal_choices.append(options)
        choices.append(options + [frozenset()])
    families = []
    truncated = False
    for combo in itertools.product(*choices):
        if len(families) == FAMILY_CAP:
            truncated = True
            break
        families.append(frozenset().union(*combo))
    maximal = []
    for combo in itertools.product(*maximal_choices):
        if len(maximal) == FAMILY_CAP:
            truncated = True
            break
        maximal.append(frozenset().union(*combo))

    return BranchingAnalysis(
        True,
        root_input=0,
        d_max=d_max,
        layers=layers,
        families=tuple(families),
        families_truncated=truncated,
        maximal_families=tuple(sorted(maximal, key=sorted)),
        max_herdable_size=sum(max(len(P), len(N)) for P, N in layers),
        k_walk_size=d_max,
        depth=tuple(depth),
    )
