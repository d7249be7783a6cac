"""Input coercion for the estimator interface."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .exceptions import ValidationError
from .graph import GROUP_LABELS, Graph, GroupAssignment

_INT_LABELS = {0: "S", 1: "T", 2: "O"}


def is_adjacency(X) -> bool:
    """Whether a non-Graph input is read as an adjacency matrix (vs an edge array)."""
    if sp.issparse(X):
        return True
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    # a 2x2 array is an adjacency matrix only if it is [[0, 1], [1, 0]],
    # which read as an edge list gives the same graph
    return arr.shape != (2, 2) or np.array_equal(arr, [[0, 1], [1, 0]])


def check_graph(X, n_nodes: int | None = None) -> Graph:
    """Coerce ``X`` into a :class:`Graph`.

    Accepts a :class:`Graph`, a square adjacency matrix (dense or scipy
    sparse, symmetric 0/1 with an empty diagonal) or an ``(m, 2)`` integer
    edge array. For edge arrays ``n_nodes`` defaults to the largest id + 1.

    Raises:
        ValidationError: on weighted, directed or malformed input.
    """
    if isinstance(X, Graph):
        if n_nodes is not None and X.n != n_nodes:
            raise ValidationError(f"graph has {X.n} nodes, expected {n_nodes}")
        return X
    if is_adjacency(X):
        return _from_adjacency(sp.csr_matrix(X))
    arr = np.asarray(X)
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-d array, got shape {arr.shape}")
    if arr.shape[1] != 2:
        raise ValidationError(f"edge array must have two columns, got shape {arr.shape}")
    if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValidationError("edge endpoints must be integers")
    edges = arr.astype(np.int64)
    if edges.size and edges.min() < 0:
        raise ValidationError("node ids must be non-negative")
    n = n_nodes if n_nodes is not None else (int(edges.max()) + 1 if edges.size else 0)
    if edges.size and edges.max() >= n:
        raise ValidationError(f"edge endpoint {int(edges.max())} out of range for {n} nodes")
    return Graph(n, edges)


def _from_adjacency(A: sp.csr_matrix) -> Graph:
    if A.shape[0] != A.shape[1]:
        raise ValidationError(f"adjacency matrix must be square, got {A.shape}")
    A.eliminate_zeros()
    if A.nnz and not np.all(A.data == 1):
        raise ValidationError("only unweighted graphs are supported (entries must be 0 or 1)")
    if A.diagonal().any():
        raise ValidationError("adjacency matrix has self-loops")
    if (A != A.T).nnz:
        raise ValidationError("adjacency matrix must be symmetric")
    upper = sp.triu(A, k=1).tocoo()
    return Graph(A.shape[0], np.stack([upper.row, upper.col], axis=1))


def check_groups(y, n_nodes: int) -> GroupAssignment:
    """Coerce ``y`` into a :class:`GroupAssignment` over ``n_nodes`` nodes.

    ``y`` is a :class:`GroupAssignment` or one label per node: ``"S"``,
    ``"T"``, ``"O"`` or the integers 0, 1, 2 in that order.
    """
    if isinstance(y, GroupAssignment):
        if y.n != n_nodes:
            raise ValidationError(f"groups cover {y.n} nodes, graph has {n_nodes}")
        return y
    if y is None:
        raise ValidationError("group labels are required")
    labels = np.asarray(y)
    if labels.ndim != 1 or len(labels) != n_nodes:
        raise ValidationError(f"expected {n_nodes} labels, got shape {labels.shape}")
    if labels.dtype.kind in "iub":
        bad = ~np.isin(labels, list(_INT_LABELS))
        if bad.any():
            raise ValidationError(f"integer labels must be 0, 1 or 2, got {int(labels[bad][0])}")
        labels = np.array([_INT_LABELS[int(x)] for x in labels])
    labels = labels.astype(str)
    bad = ~np.isin(labels, GROUP_LABELS)
    if bad.any():
        raise ValidationError(f"labels must be one of {GROUP_LABELS}, got {str(labels[bad][0])!r}")
    return GroupAssignment.from_labels(labels)
