"""scikit-learn style wrapper around the edge selection algorithms."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .baselines import select_baseline
from .exceptions import ValidationError
from .fast import fast_greedy
from .graph import Graph
from .greedy import Hyperparams, exact_greedy, gradient_greedy
from .validation import check_graph, check_groups, is_adjacency

ALGORITHMS = ("exact", "gradient", "fast")


def run_algorithm(algorithm: str, g, ga, hp: Hyperparams, **kwargs):
    """Dispatch ``exact``, ``gradient``, ``fast`` or ``baseline:<kind>``."""
    if algorithm == "exact":
        return exact_greedy(g, ga, hp)
    if algorithm == "gradient":
        return gradient_greedy(g, ga, hp)
    if algorithm == "fast":
        return fast_greedy(g, ga, hp, **kwargs)
    if algorithm.startswith("baseline:"):
        return select_baseline(g, ga, algorithm.split(":", 1)[1], hp.k, seed=hp.seed, lam=hp.lam)
    raise ValidationError(f"unknown algorithm {algorithm!r}; use one of {ALGORITHMS} "
                          "or baseline:<kind>")


class FairEdgeAugmenter(TransformerMixin, BaseEstimator):
    """Choose new edges that lower resistance and the group access gap.

    ``fit`` takes the graph as ``X`` (adjacency matrix, edge array or
    :class:`~fairaccess.graph.Graph`) and one group label per node as ``y``.
    ``transform`` returns the input graph with the selected edges added,
    in the same representation it was given.

    Args:
        k: Number of edges to add.
        lam: Fairness weight in ``[0, 1]``.
        algorithm: ``"exact"``, ``"gradient"``, ``"fast"`` or
            ``"baseline:<kind>"``.
        epsilon: Approximation error of the fast path.
        multi_group: Include the remainder group in the objective.
        random_state: Root seed.

    Attributes:
        selected_edges_: ``(k, 2)`` array of added pairs in selection order.
        records_: Per-iteration metrics, iteration 0 first.
        n_nodes_: Node count seen during ``fit``.
    """

    def __init__(self, k=10, lam=0.5, algorithm="exact", epsilon=0.3, multi_group=False,
                 random_state=0):
        self.k = k
        self.lam = lam
        self.algorithm = algorithm
        self.epsilon = epsilon
        self.multi_group = multi_group
        self.random_state = random_state

    def fit(self, X, y):
        g = check_graph(X)
        ga = check_groups(y, g.n)
        seed = 0 if self.random_state is None else self.random_state
        if not isinstance(seed, (int, np.integer)):
            raise ValidationError("random_state must be an integer or None")
        hp = Hyperparams(self.lam, self.k, self.epsilon, int(seed), self.multi_group)
        sel = run_algorithm(self.algorithm, g, ga, hp)
        self.selection_ = sel
        self.selected_edges_ = np.asarray(sel.edges, dtype=np.int64).reshape(-1, 2)
        self.records_ = sel.all_records()
        self.n_nodes_ = g.n
        return self

    def transform(self, X):
        check_is_fitted(self, "selected_edges_")
        adjacency = not isinstance(X, Graph) and is_adjacency(X)
        g = check_graph(X, None if adjacency else self.n_nodes_)
        if g.n != self.n_nodes_:
            raise ValidationError(f"fitted on {self.n_nodes_} nodes, got {g.n}")
        out = g.with_edges(self.selected_edges_)
        if isinstance(X, Graph):
            return out
        if sp.issparse(X):
            return out.adjacency_matrix
        if adjacency:
            return out.adjacency_matrix.toarray().astype(np.asarray(X).dtype)
        return out.edges.copy()
