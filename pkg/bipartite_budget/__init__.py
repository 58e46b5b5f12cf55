"""Bipartite Budget - optimal processing orders for bipartite precedence graphs."""

from .config import Config, DEFAULT_EXACT_LIMIT, DEFAULT_ORACLE_LIMIT, DEFAULT_WORK_BUDGET
from .exceptions import (
    ParseError,
    ContractViolation,
    InvalidOrderingError,
    ClassMismatchError,
    SizeLimitError,
    WorkBudgetExceeded,
    SearchBoundExceeded,
    RecognitionError,
)
from .core import (
    Instance,
    Ordering,
    budget_of_ordering,
    is_valid_ordering,
    net_value,
    parse_instance,
    serialize_instance,
    parse_ordering,
    serialize_ordering,
)
from .report import SolveReport
from .oracle import brute_force_budget
from .exact import subset_dp_budget, build_table
from .recognition import DecompTree, GraphClassReport, classify, find_min_max_ordering
from .structure import enumerate_prime_sets, find_positive_minimal, closure, superset_of, is_after
from .generators import GenSpec, ArcDiagram, generate, gen_projective_plane, instance_from_arcs
from .solvers import Solver, solve, general_budget

__all__ = [
    "Config",
    "DEFAULT_EXACT_LIMIT",
    "DEFAULT_ORACLE_LIMIT",
    "DEFAULT_WORK_BUDGET",
    "ParseError",
    "ContractViolation",
    "InvalidOrderingError",
    "ClassMismatchError",
    "SizeLimitError",
    "WorkBudgetExceeded",
    "SearchBoundExceeded",
    "RecognitionError",
    "Instance",
    "Ordering",
    "budget_of_ordering",
    "is_valid_ordering",
    "net_value",
    "parse_instance",
    "serialize_instance",
    "parse_ordering",
    "serialize_ordering",
    "SolveReport",
    "brute_force_budget",
    "subset_dp_budget",
    "build_table",
    "DecompTree",
    "GraphClassReport",
    "classify",
    "find_min_max_ordering",
    "enumerate_prime_sets",
    "find_positive_minimal",
    "closure",
    "superset_of",
    "is_after",
    "GenSpec",
    "ArcDiagram",
    "generate",
    "gen_projective_plane",
    "instance_from_arcs",
    "Solver",
    "solve",
    "general_budget",
]
