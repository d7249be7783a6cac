"""Sketch-and-hull edge selection for large graphs."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .config import DENSE_MAX_NODES
from .exceptions import NoNonEdge
from .graph import Graph, GroupAssignment
from .greedy import EdgeSelection, Hyperparams, RunRecord, make_record
from .hull import approx_ch, pairwise_sq_distances
from .kernel import pseudoinverse, sherman_morrison_update
from .sketch import PRACTICAL_SOLVER_RTOL, SolverConfig, app_diag, as_seed_sequence, build_sketch, jl_dimension, theory_constants

logger = logging.getLogger(__name__)

# exact per-iteration metrics are logged up to this size in "auto" mode
EXACT_METRICS_MAX_NODES = 5_000
# farthest-point subset size cap; keeps the subset step linear in n
HULL_MAX_SIZE = 1024


@dataclass
class FarthestResult:
    pair: tuple
    delta_tilde_value: float
    hull_size_c: int
    timings: dict = field(default_factory=dict)
    fallback: bool = False
    capped: bool = False


def _best_non_edge(g: Graph, X, rows, cols, same_set, block=512):
    """Best non-edge among ``rows x cols`` by squared distance of coordinates.

    Works through row blocks; within a block the largest entries are
    checked against the edge set one at a time, so only a handful of
    adjacency lookups happen per block.
    """
    rows = np.sort(rows)
    cols = np.sort(cols)
    Xc = X[cols]
    best_val, best_pair = -np.inf, None
    for start in range(0, len(rows), block):
        r = rows[start:start + block]
        D = pairwise_sq_distances(X[r], Xc)
        invalid = r[:, None] == cols[None, :]
        if same_set:
            invalid |= r[:, None] > cols[None, :]
        D[invalid] = -np.inf
        while True:
            flat = int(np.argmax(D))
            val = D.flat[flat]
            if val == -np.inf or val < best_val:
                break
            i, j = divmod(flat, D.shape[1])
            u, v = int(r[i]), int(cols[j])
            if g.has_edge(u, v):
                D.flat[flat] = -np.inf
                continue
            # exact ties go to the lexicographically smallest normalized pair
            tied = np.flatnonzero(D.ravel() == val)
            tu, tv = r[tied // D.shape[1]], cols[tied % D.shape[1]]
            ok = ~g.has_edges(tu, tv)
            lo, hi = np.minimum(tu[ok], tv[ok]), np.maximum(tu[ok], tv[ok])
            k = int(np.argmin(lo * g.n + hi))
            pair = (int(lo[k]), int(hi[k]))
            if val > best_val or pair < best_pair:
                best_val, best_pair = float(val), pair
            break
    return best_pair, best_val


def farthest(g: Graph, ga: GroupAssignment, lam: float, eps: float, seed, mode="practical",
             q=None, prune=True, solver_config: SolverConfig | None = None,
             hull_eps: float | None = None, max_hull: int | None = HULL_MAX_SIZE) -> FarthestResult:
    """Find a non-edge whose sketched surrogate is near the maximum.

    Builds sketched coordinates, reduces them to a farthest-point subset
    with accuracy ``eps / 25`` and scans the subset pairs that are not
    edges. If every subset pair is an edge, the scan widens to subset x all
    nodes. ``hull_eps`` overrides the subset accuracy and ``max_hull``
    caps the subset size (``None`` for no cap).
    """
    if g.num_non_edges() == 0:
        raise NoNonEdge("graph is complete")
    t0 = time.perf_counter()
    sk = build_sketch(g, ga, lam, eps, seed, mode=mode, q=q, solver_config=solver_config)
    X = sk.coordinates()
    t1 = time.perf_counter()
    eps_hull = hull_eps or theory_constants(g.n, eps)["eps_hull"]
    hull = approx_ch(X, eps_hull, prune=prune, max_size=max_hull)
    t2 = time.perf_counter()
    pair, value = _best_non_edge(g, X, hull.indices, hull.indices, True)
    fallback = pair is None
    if fallback:
        pair, value = _best_non_edge(g, X, hull.indices, np.arange(g.n), False)
    if pair is None:
        # every subset point is adjacent to every node; scan everything
        pair, value = _best_non_edge(g, X, np.arange(g.n), np.arange(g.n), True)
    t3 = time.perf_counter()
    timings = {"sketch": t1 - t0, "hull": t2 - t1, "scan": t3 - t2}
    return FarthestResult(pair, value, hull.c, timings, fallback, hull.capped)


def _sketch_record(g, ga, lam, eps, seed, it, edge, elapsed, hull_size, config=None):
    config = config or SolverConfig(PRACTICAL_SOLVER_RTOL, method="auto",
                                    practical_tolerance_mode=True)
    r = app_diag(g, eps, seed, config=config)
    n = g.n
    tr = float(r.sum())
    i_s = n / len(ga.S) * r[ga.S].sum() + tr
    i_t = n / len(ga.T) * r[ga.T].sum() + tr
    f = (1 - lam) * tr + lam * (i_s ** 2 + i_t ** 2)
    return RunRecord(it, edge, tr, i_s, i_t, i_t - i_s, f, elapsed, approximate=True,
                     hull_size=hull_size)


def fast_greedy(g: Graph, ga: GroupAssignment, hp: Hyperparams, mode="practical", q=None,
                metrics="auto", prune=True, solver_config: SolverConfig | None = None) -> EdgeSelection:
    """Add ``k`` edges, each chosen by :func:`farthest` on the current graph.

    Coordinates are rebuilt from scratch every iteration. ``metrics``
    selects how the per-iteration records are computed: ``"exact"``
    (dense kernel, rank-one updates), ``"sketch"`` (diagonal estimates,
    flagged approximate), ``"none"`` or ``"auto"`` (exact up to
    ``EXACT_METRICS_MAX_NODES`` nodes).
    """
    if hp.multi_group:
        raise ValueError("the sketched path supports the two-group objective only")
    hp.check_budget(g)
    if metrics == "auto":
        metrics = "exact" if g.n <= min(EXACT_METRICS_MAX_NODES, DENSE_MAX_NODES) else "sketch"
    seeds = as_seed_sequence(hp.seed).spawn(hp.k + 1)
    t0 = time.perf_counter()
    p = None
    nan = float("nan")
    if metrics == "exact":
        p = pseudoinverse(g)
        initial = make_record(p, ga, hp.lam, 0, None, 0.0)
    elif metrics == "sketch":
        initial = _sketch_record(g, ga, hp.lam, hp.epsilon, seeds[0], 0, None, 0.0, -1,
                                 solver_config)
    else:
        initial = RunRecord(0, None, nan, nan, nan, nan, nan)
    cur = g
    edges, records, hull_sizes, timings = [], [], [], []
    for it in range(1, hp.k + 1):
        res = farthest(cur, ga, hp.lam, hp.epsilon, seeds[it], mode=mode, q=q, prune=prune,
                       solver_config=solver_config)
        e = res.pair
        edges.append(e)
        hull_sizes.append(res.hull_size_c)
        timings.append(res.timings)
        elapsed = time.perf_counter() - t0
        if metrics == "exact":
            p = sherman_morrison_update(p, *e)
            cur = p.graph
            rec = make_record(p, ga, hp.lam, it, e, elapsed)
            rec.hull_size = res.hull_size_c
        else:
            cur = cur.with_edges([e])
            if metrics == "sketch":
                rec = _sketch_record(cur, ga, hp.lam, hp.epsilon, seeds[it].spawn(1)[0], it, e,
                                     elapsed, res.hull_size_c, solver_config)
            else:
                rec = RunRecord(it, e, nan, nan, nan, nan, nan, elapsed, hull_size=res.hull_size_c)
        records.append(rec)
        logger.debug("fast iteration %d: edge %s c=%d", it, e, res.hull_size_c)
    sel = EdgeSelection(edges, records, hp.lam, initial, "fast")
    sel.info.update(hull_sizes=hull_sizes, timings=timings, epsilon=hp.epsilon,
                    q=q or jl_dimension(g.n, hp.epsilon), mode=mode)
    return sel
