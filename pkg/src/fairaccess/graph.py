"""Graph and group data model, file loaders, and structural primitives."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .exceptions import InvalidPair, ParseError, ValidationError

logger = logging.getLogger(__name__)

GROUP_LABELS = ("S", "T", "O")


def _edge_key(u, v, n):
    return np.minimum(u, v) * n + np.maximum(u, v)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected connected graph on nodes ``0..n-1``.

    Edges are stored as an ``(m, 2)`` integer array with ``u < v`` in each
    row, sorted lexicographically. The incidence view orients every edge
    from ``u`` (head, +1) to ``v`` (tail, -1).

    Args:
        n: Number of nodes.
        edges: Iterable of node pairs. Duplicates and reversed duplicates
            collapse to a single edge.
        node_ids: Original identifiers of the nodes (for graphs read from
            files with sparse ids). Defaults to ``0..n-1``.
        check_connected: Reject disconnected input.
    """

    n: int
    edges: np.ndarray
    node_ids: np.ndarray = field(default=None, repr=False)

    def __init__(self, n, edges, node_ids=None, check_connected=True):
        n = int(n)
        if n < 1:
            raise ValidationError("graph must have at least one node")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValidationError(f"edge endpoint out of range 0..{n - 1}")
        if np.any(arr[:, 0] == arr[:, 1]):
            bad = arr[arr[:, 0] == arr[:, 1]][0]
            raise ValidationError(f"self-loop on node {bad[0]}")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        keys = np.unique(lo * n + hi)
        canon = np.column_stack([keys // n, keys % n]).astype(np.int64)
        canon.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", canon)
        if node_ids is None:
            node_ids = np.arange(n, dtype=np.int64)
        node_ids = np.asarray(node_ids, dtype=np.int64)
        if node_ids.shape != (n,):
            raise ValidationError("node_ids must have one entry per node")
        node_ids.setflags(write=False)
        object.__setattr__(self, "node_ids", node_ids)
        if check_connected and not self.is_connected():
            raise ValidationError("graph is disconnected")

    @property
    def m(self) -> int:
        return len(self.edges)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    @cached_property
    def _edge_keys(self) -> np.ndarray:
        return self.edges[:, 0] * self.n + self.edges[:, 1]

    @cached_property
    def adjacency_matrix(self) -> sp.csr_matrix:
        n = self.n
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.m)
        a = sp.csr_matrix((data, (np.r_[u, v], np.r_[v, u])), shape=(n, n))
        a.sort_indices()
        return a

    @cached_property
    def adjacency(self) -> list:
        """Per-node sorted neighbour arrays."""
        a = self.adjacency_matrix
        return [a.indices[a.indptr[i]:a.indptr[i + 1]] for i in range(self.n)]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)

    @cached_property
    def laplacian(self) -> sp.csr_matrix:
        return (sp.diags(self.degrees.astype(float)) - self.adjacency_matrix).tocsr()

    @cached_property
    def incidence(self) -> sp.csr_matrix:
        """Signed ``m x n`` edge-node incidence matrix."""
        m = self.m
        rows = np.repeat(np.arange(m), 2)
        cols = self.edges.ravel()
        data = np.tile([1.0, -1.0], m)
        return sp.csr_matrix((data, (rows, cols)), shape=(m, self.n))

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        ncomp, _ = connected_components(self.adjacency_matrix, directed=False)
        return ncomp == 1

    def has_edge(self, u, v) -> bool:
        if u == v:
            return False
        key = min(u, v) * self.n + max(u, v)
        i = np.searchsorted(self._edge_keys, key)
        return bool(i < self.m and self._edge_keys[i] == key)

    def has_edges(self, u, v) -> np.ndarray:
        """Vectorized :meth:`has_edge` over arrays of endpoints."""
        keys = _edge_key(np.asarray(u), np.asarray(v), self.n)
        idx = np.searchsorted(self._edge_keys, keys)
        idx = np.minimum(idx, max(self.m - 1, 0))
        if self.m == 0:
            return np.zeros(keys.shape, dtype=bool)
        return self._edge_keys[idx] == keys

    def num_non_edges(self) -> int:
        return self.n * (self.n - 1) // 2 - self.m

    def with_edges(self, pairs) -> "Graph":
        """Return a new graph with ``pairs`` added (connectivity is preserved)."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        return Graph(self.n, np.vstack([self.edges, pairs]), node_ids=self.node_ids,
                     check_connected=False)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(map(tuple, self.edges.tolist()))
        return g


@dataclass(frozen=True, eq=False)
class GroupAssignment:
    """Partition of the nodes into advantaged ``S``, disadvantaged ``T``
    and an optional remainder ``O``."""

    n: int
    S: np.ndarray
    T: np.ndarray
    O: np.ndarray

    def __init__(self, n, S, T, O=None):
        n = int(n)
        S = np.unique(np.asarray(list(S), dtype=np.int64))
        T = np.unique(np.asarray(list(T), dtype=np.int64))
        if len(S) == 0:
            raise ValidationError("group S is empty")
        if len(T) == 0:
            raise ValidationError("group T is empty")
        for name, grp in (("S", S), ("T", T)):
            if grp.min() < 0 or grp.max() >= n:
                raise ValidationError(f"group {name} has node id out of range 0..{n - 1}")
        if np.intersect1d(S, T).size:
            raise ValidationError("groups S and T overlap")
        rest = np.setdiff1d(np.arange(n), np.union1d(S, T))
        if O is None:
            O = rest
        else:
            O = np.unique(np.asarray(list(O), dtype=np.int64))
            if not np.array_equal(O, rest):
                raise ValidationError("S, T and O must partition the node set")
        for arr in (S, T, O):
            arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "O", O)

    def __repr__(self):
        return f"GroupAssignment(|S|={len(self.S)}, |T|={len(self.T)}, |O|={len(self.O)})"

    @classmethod
    def from_labels(cls, labels: Sequence) -> "GroupAssignment":
        labels = np.asarray(labels).astype(str)
        idx = np.arange(len(labels))
        return cls(len(labels), idx[labels == "S"], idx[labels == "T"])

    @property
    def labels(self) -> np.ndarray:
        out = np.full(self.n, "O", dtype="<U1")
        out[self.S] = "S"
        out[self.T] = "T"
        return out

    def groups(self, include_remainder=False) -> list:
        out = [self.S, self.T]
        if include_remainder and len(self.O):
            out.append(self.O)
        return out


def _tokens(path) -> Iterator:
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line.split()


def _parse_int(tok, lineno, path):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: expected integer node id, got {tok!r}") from None


def read_edge_list(path) -> np.ndarray:
    """Parse a whitespace separated ``u v`` edge list into raw id pairs."""
    pairs = []
    for lineno, toks in _tokens(path):
        if len(toks) == 3:
            try:
                float(toks[2])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: malformed line {' '.join(toks)!r}") from None
            raise ValidationError(f"{path}:{lineno}: weighted edges are not supported")
        if len(toks) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'u v', got {' '.join(toks)!r}")
        u, v = (_parse_int(t, lineno, path) for t in toks)
        pairs.append((u, v))
    return np.asarray(pairs, dtype=np.int64).reshape(-1, 2)


def graph_from_pairs(pairs, largest_component=False) -> Graph:
    """Build a :class:`Graph` from raw id pairs, remapping ids to ``0..n-1``."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs) == 0:
        raise ValidationError("edge list is empty")
    if np.any(pairs[:, 0] == pairs[:, 1]):
        bad = pairs[pairs[:, 0] == pairs[:, 1]][0, 0]
        raise ValidationError(f"self-loop on node {bad}")
    ids, inverse = np.unique(pairs.ravel(), return_inverse=True)
    local = inverse.reshape(-1, 2)
    g = Graph(len(ids), local, node_ids=ids, check_connected=False)
    if g.is_connected():
        return g
    if not largest_component:
        raise ValidationError("graph is disconnected (use largest-component extraction)")
    return largest_connected_component(g)


def largest_connected_component(g: Graph) -> Graph:
    _, comp = connected_components(g.adjacency_matrix, directed=False)
    sizes = np.bincount(comp)
    keep = np.flatnonzero(comp == np.argmax(sizes))
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    mask = comp[g.edges[:, 0]] == np.argmax(sizes)
    logger.info("keeping largest component: %d of %d nodes", len(keep), g.n)
    return Graph(len(keep), remap[g.edges[mask]], node_ids=g.node_ids[keep])


def load_graph(path, largest_component=False) -> Graph:
    """Load a graph from an edge-list file.

    Lines hold ``u v`` separated by whitespace; ``#`` starts a comment.
    Arbitrary integer ids are remapped to dense ``0..n-1`` in sorted order;
    the original ids are kept in ``Graph.node_ids``.
    """
    return graph_from_pairs(read_edge_list(path), largest_component=largest_component)


def load_groups(path, g: Graph) -> GroupAssignment:
    """Load ``node_id label`` lines (label in S/T/O) for graph ``g``.

    Node ids refer to the original ids of the edge-list file. Unlisted
    nodes go to the remainder group ``O``.
    """
    lookup = {int(orig): i for i, orig in enumerate(g.node_ids.tolist())}
    labels = np.full(g.n, "O", dtype="<U1")
    for lineno, toks in _tokens(path):
        if len(toks) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'node_id label', got {' '.join(toks)!r}")
        node = _parse_int(toks[0], lineno, path)
        label = toks[1]
        if label not in GROUP_LABELS:
            raise ParseError(f"{path}:{lineno}: label must be one of S, T, O; got {label!r}")
        if node not in lookup:
            raise ValidationError(f"{path}:{lineno}: node id {node} is not in the graph")
        labels[lookup[node]] = label
    return GroupAssignment.from_labels(labels)


def write_graph(g: Graph, path, original_ids=True):
    ids = g.node_ids if original_ids else np.arange(g.n)
    with open(path, "w", newline="\n") as fh:
        for u, v in g.edges.tolist():
            fh.write(f"{ids[u]} {ids[v]}\n")


def write_groups(g: Graph, ga: GroupAssignment, path, original_ids=True):
    ids = g.node_ids if original_ids else np.arange(g.n)
    with open(path, "w", newline="\n") as fh:
        for node, label in enumerate(ga.labels.tolist()):
            fh.write(f"{ids[node]} {label}\n")


def write_mapping(g: Graph, path):
    """Write ``original_id new_id`` per line."""
    with open(path, "w", newline="\n") as fh:
        for new, orig in enumerate(g.node_ids.tolist()):
            fh.write(f"{orig} {new}\n")


def non_edges(g: Graph) -> Iterator[tuple]:
    """Yield every unordered pair ``(u, v)``, ``u < v``, that is not an edge."""
    for u in range(g.n - 1):
        nbrs = g.adjacency[u]
        vs = np.setdiff1d(np.arange(u + 1, g.n), nbrs, assume_unique=True)
        for v in vs.tolist():
            yield (u, v)


def non_edge_array(g: Graph, exclude: Iterable = ()) -> np.ndarray:
    """All non-edges as a lexicographically sorted ``(k, 2)`` array."""
    iu, ju = np.triu_indices(g.n, 1)
    keep = ~g.has_edges(iu, ju)
    exclude = list(exclude)
    if exclude:
        ex = np.asarray(exclude, dtype=np.int64).reshape(-1, 2)
        keys = _edge_key(iu, ju, g.n)
        keep &= ~np.isin(keys, _edge_key(ex[:, 0], ex[:, 1], g.n))
    return np.column_stack([iu[keep], ju[keep]]).astype(np.int64)


def incidence_vector(g: Graph, u: int, v: int, dense=True):
    """``e_u - e_v`` for the pair ``(u, v)``."""
    if u == v:
        raise InvalidPair(f"pair ({u}, {v}) has identical endpoints")
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise InvalidPair(f"pair ({u}, {v}) out of range")
    if dense:
        b = np.zeros(g.n)
        b[u], b[v] = 1.0, -1.0
        return b
    return sp.csr_matrix(([1.0, -1.0], ([0, 0], [u, v])), shape=(1, g.n))


def normalize_pair(u, v) -> tuple:
    u, v = int(u), int(v)
    if u == v:
        raise InvalidPair(f"pair ({u}, {v}) has identical endpoints")
    return (u, v) if u < v else (v, u)
