"""Kearns-Vazirani automata learning with classification-tree reuse.

The learner keeps its classification tree between sessions; when the system
under learning evolves, the stale tree is pruned and learning resumes from it
instead of from scratch.
"""

from .automata import (
    Dfa,
    accepts,
    apply_feature_add,
    apply_mutation_scenario,
    complement,
    equivalent,
    exact_counterexample,
    load_dfa,
    minimize,
    random_dfa,
    reach,
    save_dfa,
    trivial_bottom,
    trivial_top,
)
from .ctree import ClassificationTree, load_tree, minimize_tree, save_tree, sift
from .errors import (
    AggregationError,
    GenerationError,
    InputError,
    KvError,
    LearnerInvariantError,
    ParseError,
    StructuralError,
)
from .learners import build_hypothesis, classic_kv, incremental_kv, update_tree
from .metrics import progress, progress_truncated
from .oracles import CountingOracle, EqConfig, EvolvingTarget, QueryCounter, eq_exact, eq_random

__version__ = "0.1.0"

__all__ = [
    "AggregationError", "ClassificationTree", "CountingOracle", "Dfa", "EqConfig", "EvolvingTarget",
    "GenerationError", "InputError", "KvError", "LearnerInvariantError", "ParseError", "QueryCounter",
    "StructuralError", "accepts", "apply_feature_add", "apply_mutation_scenario", "build_hypothesis",
    "classic_kv", "complement", "eq_exact", "eq_random", "equivalent", "exact_counterexample",
    "incremental_kv", "load_dfa", "load_tree", "minimize", "minimize_tree", "progress",
    "progress_truncated", "random_dfa", "reach", "save_dfa", "save_tree", "sift", "trivial_bottom",
    "trivial_top", "update_tree",
]
