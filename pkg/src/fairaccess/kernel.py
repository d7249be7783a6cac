"""Dense Laplacian pseudoinverse and the exact resistance/fairness metrics.

Everything here works on a :class:`DensePinv`, which pairs the pseudoinverse
matrix with the graph it belongs to so that rank-one updates can refuse edges
that already exist.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .config import DENSE_MAX_NODES, TOL
from .exceptions import EdgeExists, EmptyGroup, GraphTooLarge, InvalidPair, SingularMatrix
from .graph import Graph, GroupAssignment


class DensePinv:
    """Read-only ``n x n`` pseudoinverse ``L^+`` of a connected graph."""

    __slots__ = ("P", "graph")

    def __init__(self, P: np.ndarray, graph: Graph):
        P = np.asarray(P, dtype=np.float64)
        P.setflags(write=False)
        self.P = P
        self.graph = graph

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def diag(self) -> np.ndarray:
        return np.diagonal(self.P)

    @property
    def trace(self) -> float:
        return float(np.trace(self.P))

    def __repr__(self):
        return f"DensePinv(n={self.n}, trace={self.trace:.6g})"


def check_dense_size(n, n_max=DENSE_MAX_NODES):
    if n > n_max:
        raise GraphTooLarge(f"n={n} exceeds the dense cap of {n_max} nodes")


def pseudoinverse(g: Graph, n_max=DENSE_MAX_NODES) -> DensePinv:
    """Compute ``L^+ = (L + J/n)^{-1} - J/n`` with a Cholesky factorization."""
    check_dense_size(g.n, n_max)
    n = g.n
    A = g.laplacian.toarray()
    A += 1.0 / n
    try:
        c, low = sla.cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("L + J/n is not positive definite; is the graph connected?") from exc
    P = sla.cho_solve((c, low), np.eye(n), check_finite=False)
    P -= 1.0 / n
    P = 0.5 * (P + P.T)
    return DensePinv(P, g)


def _check_node(p: DensePinv, v):
    if not 0 <= v < p.n:
        raise InvalidPair(f"node {v} out of range 0..{p.n - 1}")


def pairwise_resistance(p: DensePinv, u: int, v: int) -> float:
    """Effective resistance ``b_uv^T L^+ b_uv``."""
    if u == v:
        raise InvalidPair(f"pair ({u}, {v}) has identical endpoints")
    _check_node(p, u)
    _check_node(p, v)
    P = p.P
    return float(P[u, u] + P[v, v] - 2.0 * P[u, v])


def resistance_matrix(p: DensePinv) -> np.ndarray:
    d = p.diag
    return d[:, None] + d[None, :] - 2.0 * p.P


def node_resistance(p: DensePinv, v: int) -> float:
    """Sum of resistances from ``v`` to every node: ``n L^+_vv + tr L^+``."""
    _check_node(p, v)
    return float(p.n * p.P[v, v] + p.trace)


def kirchhoff_index(p: DensePinv) -> float:
    return p.n * p.trace


def graph_resistance(p: DensePinv) -> float:
    return p.trace


def _group_access_from_diag(diag_sum, size, n, trace):
    return n / size * diag_sum + trace


def group_access(p: DensePinv, grp) -> float:
    """Average node resistance over ``grp``."""
    grp = np.asarray(list(grp) if not isinstance(grp, np.ndarray) else grp, dtype=np.int64)
    if grp.size == 0:
        raise EmptyGroup("group access is undefined for an empty group")
    grp = np.unique(grp)
    return float(_group_access_from_diag(p.diag[grp].sum(), len(grp), p.n, p.trace))


def unfairness(p: DensePinv, ga: GroupAssignment) -> float:
    """``I_T - I_S``; negative when T is actually the better-connected group."""
    return group_access(p, ga.T) - group_access(p, ga.S)


def objective(p: DensePinv, ga: GroupAssignment, lam: float, multi_group=False) -> float:
    """``(1 - lam) R + lam (I_S^2 + I_T^2)`` (plus ``lam I_O^2`` in multi-group mode)."""
    _check_lambda(lam)
    terms = sum(group_access(p, grp) ** 2 for grp in ga.groups(multi_group))
    return (1.0 - lam) * p.trace + lam * terms


def _check_lambda(lam):
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")


@dataclass(frozen=True)
class Metrics:
    R: float
    I_S: float
    I_T: float
    U: float
    F: float
    I_O: float = float("nan")


def metrics(p: DensePinv, ga: GroupAssignment, lam: float, multi_group=False) -> Metrics:
    i_s = group_access(p, ga.S)
    i_t = group_access(p, ga.T)
    i_o = group_access(p, ga.O) if len(ga.O) else float("nan")
    return Metrics(R=p.trace, I_S=i_s, I_T=i_t, U=i_t - i_s,
                   F=objective(p, ga, lam, multi_group), I_O=i_o)


def sherman_morrison_update(p: DensePinv, u: int, v: int) -> DensePinv:
    """Pseudoinverse after adding edge ``(u, v)``.

    ``L^+ - L^+ b b^T L^+ / (1 + b^T L^+ b)``; O(n^2). Returns a new object.
    """
    if u == v:
        raise InvalidPair(f"pair ({u}, {v}) has identical endpoints")
    if p.graph.has_edge(u, v):
        raise EdgeExists(f"edge ({u}, {v}) already exists")
    P = p.P
    w = P[:, u] - P[:, v]
    r = w[u] - w[v]
    Pn = P - np.outer(w, w) / (1.0 + r)
    return DensePinv(Pn, p.graph.with_edges([(u, v)]))


def marginal_decrease(p: DensePinv, ga: GroupAssignment, lam: float, u: int, v: int,
                      multi_group=False) -> float:
    """``F(before) - F(after)`` for adding edge ``(u, v)``."""
    after = sherman_morrison_update(p, u, v)
    return objective(p, ga, lam, multi_group) - objective(after, ga, lam, multi_group)


class PairScorer:
    """Vectorized closed-form scores for many candidate pairs at once.

    Adding edge ``e`` changes ``L^+`` by ``-w w^T / (1 + r)`` with
    ``w = L^+ b_e`` and ``r = b_e^T L^+ b_e``. Every quantity the objective
    needs after the update is a function of ``r`` and the squared norms of
    ``w`` restricted to each group, which are quadratic forms in ``L^+ L^+``
    and ``L^+ E^X L^+``. Precomputing those matrices costs a few dense
    matrix products; each pair then costs O(1).
    """

    def __init__(self, p: DensePinv, ga: GroupAssignment, lam: float, multi_group=False):
        _check_lambda(lam)
        self.p = p
        self.lam = lam
        self.n = p.n
        P = p.P
        self.groups = ga.groups(multi_group)
        self.sizes = np.array([len(g) for g in self.groups], dtype=float)
        diag = p.diag
        self.trace = float(diag.sum())
        self.diag_sums = np.array([diag[g].sum() for g in self.groups])
        self.access = self.n / self.sizes * self.diag_sums + self.trace
        self._P2 = P @ P
        self._PX = []
        for grp in self.groups:
            if len(grp) == self.n:
                self._PX.append(self._P2)
            else:
                self._PX.append(P[:, grp] @ P[grp, :])

    @staticmethod
    def _quad(M, u, v):
        return M[u, u] + M[v, v] - 2.0 * M[u, v]

    def pair_terms(self, u, v):
        """Return ``r``, ``||w||^2`` and per-group ``||E^X w||^2`` arrays."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        r = self._quad(self.p.P, u, v)
        nw = self._quad(self._P2, u, v)
        nx = [self._quad(M, u, v) for M in self._PX]
        return r, nw, nx

    def objective_value(self) -> float:
        return (1.0 - self.lam) * self.trace + self.lam * float(np.sum(self.access ** 2))

    def decrease(self, u, v) -> np.ndarray:
        """Exact marginal decrease of the objective for each pair."""
        r, nw, nx = self.pair_terms(u, v)
        scale = 1.0 + r
        dtrace = nw / scale
        out = (1.0 - self.lam) * dtrace
        for gi, ngx in enumerate(nx):
            d_access = self.n / self.sizes[gi] * ngx / scale + dtrace
            out = out + self.lam * d_access * (2.0 * self.access[gi] - d_access)
        return out

    def after(self, u, v):
        """Per-pair trace and group-diagonal sums after adding each pair."""
        r, nw, nx = self.pair_terms(u, v)
        scale = 1.0 + r
        tr = self.trace - nw / scale
        sums = [self.diag_sums[gi] - ngx / scale for gi, ngx in enumerate(nx)]
        return tr, sums

    def coefficients(self):
        return surrogate_coefficients(self.trace, self.diag_sums, self.sizes, self.n, self.lam)

    def surrogate(self, u, v) -> np.ndarray:
        """Gradient surrogate for each pair (see :func:`delta_bar`)."""
        alpha, betas = self.coefficients()
        _, nw, nx = self.pair_terms(u, v)
        out = alpha * nw
        for beta, ngx in zip(betas, nx):
            out = out + beta * ngx
        return out


def surrogate_coefficients(trace, diag_sums, sizes, n, lam):
    """Coefficients of the first-order decrease of the objective.

    With group access ``I_X = (n/|X|) L^+_X + tr L^+`` the derivative of the
    objective with respect to the weight of a candidate edge is
    ``alpha ||L^+ b||^2 + sum_X beta_X ||E^X L^+ b||^2`` where
    ``alpha = 1 - lam + 2 lam sum_X I_X`` and ``beta_X = 2 lam (n/|X|) I_X``.

    Args:
        trace: ``tr L^+`` (exact or estimated).
        diag_sums: ``L^+_X`` for each group.
        sizes: ``|X|`` for each group.
        n: Number of nodes.
        lam: Fairness weight.

    Returns:
        ``(alpha, betas)`` where ``betas`` has one entry per group.
    """
    diag_sums = np.asarray(diag_sums, dtype=float)
    sizes = np.asarray(sizes, dtype=float)
    access = n / sizes * diag_sums + trace
    alpha = 1.0 - lam + 2.0 * lam * float(access.sum())
    betas = 2.0 * lam * (n / sizes) * access
    return alpha, betas


def delta_bar(p: DensePinv, ga: GroupAssignment, lam: float, u: int, v: int,
              multi_group=False) -> float:
    """Gradient surrogate of the marginal decrease for pair ``(u, v)``.

    ``alpha ||L^+ b||^2 + beta ||E^S L^+ b||^2 + gamma ||E^T L^+ b||^2``
    with coefficients evaluated at the current graph.
    """
    if u == v:
        raise InvalidPair(f"pair ({u}, {v}) has identical endpoints")
    _check_lambda(lam)
    groups = ga.groups(multi_group)
    diag = p.diag
    alpha, betas = surrogate_coefficients(
        p.trace, [diag[g].sum() for g in groups], [len(g) for g in groups], p.n, lam)
    w = p.P[:, u] - p.P[:, v]
    out = alpha * float(w @ w)
    for beta, grp in zip(betas, groups):
        wg = w[grp]
        out += beta * float(wg @ wg)
    return out


def node_coordinates(p: DensePinv, ga: GroupAssignment, lam: float) -> np.ndarray:
    """Exact embedding whose squared pairwise distances equal :func:`delta_bar`.

    Row ``i`` is ``(sqrt(alpha) L^+[i, :], sqrt(beta) L^+[S, i], sqrt(gamma) L^+[T, i])``.
    """
    groups = ga.groups()
    diag = p.diag
    alpha, betas = surrogate_coefficients(
        p.trace, [diag[g].sum() for g in groups], [len(g) for g in groups], p.n, lam)
    blocks = [np.sqrt(alpha) * p.P]
    for beta, grp in zip(betas, groups):
        blocks.append(np.sqrt(beta) * p.P[:, grp])
    return np.hstack(blocks)


def check_pinv_invariants(p: DensePinv, tol=TOL) -> None:
    """Assert the structural invariants of a pseudoinverse (used in tests)."""
    P = p.P
    scale = np.abs(P).max()
    assert np.abs(P - P.T).max() <= tol.symmetry_rtol * scale
    assert np.abs(P.sum(axis=1)).max() <= tol.row_sum_rtol * p.n * scale
