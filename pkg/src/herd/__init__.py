"""Herdability of linear systems on signed directed graphs."""

from .estimator import HerdabilityAnalyzer
from .herdability import (
    BranchingAnalysis,
    HerdabilityVerdict,
    SignHerdabilityReport,
    analyze_branching,
    check_set,
    completely_herdable,
    herdable_states,
    positive_system_verdict,
    sign_herdable,
    unisigned_sufficient,
    unisigned_witness,
)
from .linsys import (
    ControllabilityMatrix,
    RangeBasis,
    WalkWeightTable,
    controllability_matrix,
    is_positive_system,
    range_basis,
    rank,
    rho_table,
)
from .model import (
    Edge,
    FormatError,
    LinearSystem,
    Matrix,
    Node,
    SignedDigraph,
    Walk,
    graph_to_sign_pattern,
    input_node,
    load_model,
    loads_model,
    parse_node,
    restrict_to_input,
    state,
    system_to_graph,
)
from .synthesis import PreconditionError, SynthesisConfig, SynthesisResult, synthesize
from .walks import ReachabilityReport, WalkSets, compute_walk_sets, enumerate_walks, reachability

__version__ = "0.1.0"
