"""Heuristic and exact comparison strategies for edge selection."""
from __future__ import annotations

import enum
import logging

import numpy as np

from .config import DENSE_MAX_NODES
from .exceptions import InsufficientCandidates, NoConvergence
from .graph import Graph, GroupAssignment
from .greedy import EdgeSelection, Hyperparams, RunRecord, brute_force_optimum, exact_greedy, replay
from .kernel import pseudoinverse
from .sketch import LaplacianSolver, SolverConfig, as_seed_sequence

logger = logging.getLogger(__name__)


class BaselineKind(enum.Enum):
    RANDOM = "random"
    DEGREE_PRODUCT = "degree-product"
    DEGREE_SUM = "degree-sum"
    BETWEENNESS_PRODUCT = "betweenness-product"
    BETWEENNESS_SUM = "betweenness-sum"
    FIEDLER = "fiedler"
    EFFECTIVE_RESISTANCE = "effective-resistance"
    OPTIMUM_R = "optimum-r"
    OPTIMUM_U = "optimum-u"
    KIRCHHOFF_GREEDY = "kirchhoff-greedy"

    @classmethod
    def parse(cls, name: str) -> "BaselineKind":
        key = name.strip().lower().replace("_", "-")
        aliases = {"dp": "degree-product", "ds": "degree-sum", "bp": "betweenness-product",
                   "bs": "betweenness-sum", "er": "effective-resistance", "kirmin": "kirchhoff-greedy"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown baseline {name!r}; choose from {[k.value for k in cls]}")


def betweenness(g: Graph, batch: int = 64) -> np.ndarray:
    """Unnormalized shortest-path betweenness, each unordered pair counted once.

    Brandes' accumulation, run for a batch of sources at a time: path
    counts are pushed forward level by level with sparse products and the
    dependencies are pulled back the same way.
    """
    n = g.n
    A = g.adjacency_matrix.astype(np.float64)
    bc = np.zeros(n)
    for start in range(0, n, batch):
        src = np.arange(start, min(start + batch, n))
        b = len(src)
        cols = np.arange(b)
        dist = np.full((n, b), -1, dtype=np.int64)
        sigma = np.zeros((n, b))
        dist[src, cols] = 0
        sigma[src, cols] = 1.0
        frontier = np.zeros((n, b))
        frontier[src, cols] = 1.0
        levels = [frontier.astype(bool)]
        d = 0
        while True:
            reach = A @ (sigma * levels[-1])
            new = (dist < 0) & (reach > 0)
            if not new.any():
                break
            d += 1
            dist[new] = d
            sigma[new] = reach[new]
            levels.append(new)
        delta = np.zeros((n, b))
        for lvl in range(len(levels) - 1, 0, -1):
            coef = np.where(levels[lvl], (1.0 + delta) / np.where(sigma > 0, sigma, 1.0), 0.0)
            pulled = A @ coef
            delta += np.where(levels[lvl - 1], sigma * pulled, 0.0)
        delta[src, cols] = 0.0
        bc += delta.sum(axis=1)
    return bc / 2.0


def _sign_normalize(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-12 * max(np.abs(v).max(), 1e-300))
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def fiedler_vector(g: Graph, tol: float = 1e-10, max_iters: int = 500, seed=0,
                   block: int = 4) -> np.ndarray:
    """Unit eigenvector of ``L`` for its second-smallest eigenvalue.

    Block inverse iteration on the complement of the ones vector with a
    Rayleigh-Ritz step each round; the first nonzero entry is made positive.

    Raises:
        NoConvergence: if the eigen-residual stays above ``tol * ||L||``.
    """
    n = g.n
    if n < 2:
        raise ValueError("need at least two nodes")
    L = g.laplacian
    p = min(block, n - 1)
    rng = np.random.default_rng(as_seed_sequence(seed))
    X = rng.standard_normal((n, p))
    solver = LaplacianSolver(g, SolverConfig(delta=1e-12, method="auto",
                                             practical_tolerance_mode=True))
    scale = 2.0 * float(g.degrees.max())
    for it in range(max_iters):
        X -= X.mean(axis=0)
        X, _ = np.linalg.qr(X)
        H = X.T @ (L @ X)
        theta, W = np.linalg.eigh((H + H.T) / 2)
        V = X @ W
        v = V[:, 0]
        res = np.linalg.norm(L @ v - theta[0] * v)
        if res <= tol * scale or p == n - 1:
            v = v - v.mean()
            return _sign_normalize(v / np.linalg.norm(v))
        X = solver.solve(V)
    raise NoConvergence(f"Fiedler iteration did not converge in {max_iters} rounds "
                        f"(residual {res:.3g})")


def cross_group_non_edges(g: Graph, ga: GroupAssignment) -> np.ndarray:
    """Non-edges with one endpoint in S and the other in T, lexicographically sorted."""
    S, T = np.asarray(ga.S), np.asarray(ga.T)
    U, V = np.meshgrid(S, T, indexing="ij")
    lo, hi = np.minimum(U, V).ravel(), np.maximum(U, V).ravel()
    keep = ~g.has_edges(lo, hi)
    pairs = np.stack([lo[keep], hi[keep]], axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def _top_k(cand: np.ndarray, scores: np.ndarray, k: int) -> list:
    # stable sort keeps lexicographic order among equal scores
    order = np.argsort(-scores, kind="stable")[:k]
    return [(int(cand[i, 0]), int(cand[i, 1])) for i in order]


def _pair_scores(kind: BaselineKind, g: Graph, cand: np.ndarray) -> np.ndarray:
    u, v = cand[:, 0], cand[:, 1]
    if kind in (BaselineKind.DEGREE_PRODUCT, BaselineKind.DEGREE_SUM):
        x = g.degrees.astype(np.float64)
    elif kind in (BaselineKind.BETWEENNESS_PRODUCT, BaselineKind.BETWEENNESS_SUM):
        x = betweenness(g)
    elif kind is BaselineKind.FIEDLER:
        f = fiedler_vector(g)
        return np.abs(f[u] - f[v])
    elif kind is BaselineKind.EFFECTIVE_RESISTANCE:
        P = pseudoinverse(g).P
        return P[u, u] + P[v, v] - 2.0 * P[u, v]
    else:
        raise ValueError(f"{kind} is not a ranking baseline")
    if kind in (BaselineKind.DEGREE_PRODUCT, BaselineKind.BETWEENNESS_PRODUCT):
        return x[u] * x[v]
    return x[u] + x[v]


def _records(g, ga, edges, lam, name, with_records):
    if with_records and g.n <= DENSE_MAX_NODES:
        return replay(g, ga, edges, lam, name=name)
    nan = float("nan")
    recs = [RunRecord(i, e, nan, nan, nan, nan, nan) for i, e in enumerate(edges, 1)]
    return EdgeSelection(list(edges), recs, lam, RunRecord(0, None, nan, nan, nan, nan, nan), name)


def select_baseline(g: Graph, ga: GroupAssignment, kind, k: int, seed=0, lam: float = 0.5,
                    with_records: bool = True) -> EdgeSelection:
    """Pick ``k`` edges with a comparison strategy.

    Heuristic kinds rank cross-group non-edges once on the input graph and
    take the top ``k``; ``RANDOM`` samples them uniformly without
    replacement. The optimum kinds search all non-edges exhaustively and
    ``KIRCHHOFF_GREEDY`` is the exact greedy with ``lam = 0``.

    Args:
        lam: Only used for the objective column of the returned records.
        with_records: Replay the selection on the exact kernel to fill in
            per-iteration metrics.

    Raises:
        InsufficientCandidates: fewer than ``k`` cross-group non-edges.
    """
    kind = BaselineKind.parse(kind) if isinstance(kind, str) else kind
    if kind is BaselineKind.OPTIMUM_R or kind is BaselineKind.OPTIMUM_U:
        target = "R" if kind is BaselineKind.OPTIMUM_R else "U"
        sel = brute_force_optimum(g, ga, Hyperparams(lam, k, seed=seed), target=target)
        sel.algorithm = kind.value
        return sel
    if kind is BaselineKind.KIRCHHOFF_GREEDY:
        sel = exact_greedy(g, ga, Hyperparams(0.0, k, seed=seed))
        # report the objective at the caller's lambda
        sel = replay(g, ga, sel.edges, lam, name=kind.value) if with_records else sel
        sel.algorithm = kind.value
        return sel
    cand = cross_group_non_edges(g, ga)
    if len(cand) < k:
        raise InsufficientCandidates(f"{kind.value} needs {k} cross-group non-edges, "
                                     f"only {len(cand)} exist")
    if kind is BaselineKind.RANDOM:
        rng = np.random.default_rng(as_seed_sequence(seed))
        picks = rng.choice(len(cand), size=k, replace=False)
        edges = [(int(cand[i, 0]), int(cand[i, 1])) for i in picks]
    else:
        edges = _top_k(cand, _pair_scores(kind, g, cand), k)
    return _records(g, ga, edges, lam, kind.value, with_records)
