"""scikit-learn style front end.

``HerdabilityAnalyzer().fit(A, B)`` runs the exact analyses once and exposes
the results as fitted attributes; ``predict`` answers set-herdability queries.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .herdability import (
    HerdabilityVerdict,
    check_set,
    completely_herdable,
    herdable_states,
    sign_herdable,
    unisigned_sufficient,
)
from .linsys import controllability_matrix, is_positive_system, range_basis
from .model import system_to_graph
from .synthesis import SynthesisConfig, SynthesisResult, synthesize
from .validation import check_state_set, check_system
from .walks import compute_walk_sets, reachability


class HerdabilityAnalyzer(BaseEstimator):
    """Exact herdability analysis of ``x' = Ax + Bu``.

    Parameters
    ----------
    depth_bound : int, optional
        Walk length horizon for the sign analysis. Defaults to the state count.
    float_mode : bool
        Accept non-integral floats, snapping magnitudes below 1e-9 to zero.

    Attributes
    ----------
    system_, graph_, controllability_matrix_, rank_, herdable_states_,
    input_connectable_, complete_verdict_, unisigned_assignment_, sign_report_,
    walk_sets_, is_positive_, n_states_, n_inputs_
    """

    def __init__(self, depth_bound: int | None = None, float_mode: bool = False):
        self.depth_bound = depth_bound
        self.float_mode = float_mode

    def fit(self, A, B=None):
        sys = check_system(A, B, float_mode=self.float_mode)
        self.system_ = sys
        self.graph_ = system_to_graph(sys)
        self.n_states_, self.n_inputs_ = sys.n, sys.m
        C = controllability_matrix(sys)
        self.controllability_matrix_ = C
        self.rank_ = range_basis(C).rank
        self.herdable_states_ = herdable_states(C)
        self.input_connectable_ = reachability(self.graph_).input_connectable
        self.complete_verdict_ = completely_herdable(C)
        self.unisigned_assignment_ = unisigned_sufficient(C)
        self.walk_sets_ = compute_walk_sets(self.graph_, self.depth_bound or sys.n)
        self.sign_report_ = sign_herdable(self.graph_, self.depth_bound)
        self.is_positive_ = is_positive_system(sys)
        return self

    def check(self, X: Iterable[int]) -> HerdabilityVerdict:
        """Verdict for one 0-based state set."""
        check_is_fitted(self, "controllability_matrix_")
        return check_set(self.controllability_matrix_, check_state_set(X, self.n_states_))

    def predict(self, sets: Iterable[Iterable[int]]) -> np.ndarray:
        """Boolean herdability for each 0-based state set."""
        return np.array([self.check(X).herdable for X in sets], dtype=bool)

    def score(self, sets, y) -> float:
        """Fraction of sets whose verdict matches ``y``."""
        return float(np.mean(self.predict(sets) == np.asarray(y, dtype=bool)))

    def steer(self, X: Iterable[int], **config) -> SynthesisResult:
        """Synthesise an input driving ``X`` above a threshold (see :class:`SynthesisConfig`)."""
        verdict = self.check(X)
        return synthesize(self.system_, verdict.query_set, SynthesisConfig(**config),
                          witness=verdict.witness if verdict.herdable else None,
                          C=self.controllability_matrix_)
