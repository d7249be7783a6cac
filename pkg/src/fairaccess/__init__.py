"""Edge selection for fair information access on graphs.

Adding a few edges to a network can lower the effective resistance between
nodes and shrink the gap in resistance between an advantaged group ``S``
and a disadvantaged group ``T``. This package scores and selects such edges
with an exact greedy, a gradient-surrogate greedy and a sketched fast path.
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.1.0"

from .baselines import BaselineKind, betweenness, fiedler_vector, select_baseline
from .estimator import FairEdgeAugmenter
from .exceptions import FairAccessError
from .fast import farthest, fast_greedy
from .graph import Graph, GroupAssignment, load_graph, load_groups, non_edges
from .greedy import (EdgeSelection, Hyperparams, RunRecord, brute_force_optimum, exact_greedy,
                     gradient_greedy)
from .kernel import metrics, pseudoinverse
from .netgen import BAhParams, generate_bah

__all__ = [
    "BAhParams", "BaselineKind", "EdgeSelection", "FairAccessError", "FairEdgeAugmenter",
    "Graph", "GroupAssignment", "Hyperparams", "RunRecord", "betweenness",
    "brute_force_optimum", "exact_greedy", "farthest", "fast_greedy", "fiedler_vector",
    "generate_bah", "gradient_greedy", "load_graph", "load_groups", "metrics", "non_edges",
    "pseudoinverse", "select_baseline",
]
