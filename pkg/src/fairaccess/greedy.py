"""Greedy edge selection on the exact kernel, and exhaustive optimum search."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .config import BRUTE_FORCE_CAP, DENSE_MAX_NODES, TOL
from .exceptions import BudgetTooLarge, CombinatorialBlowup, ValidationError
from .graph import Graph, GroupAssignment, non_edge_array
from .kernel import (
    DensePinv,
    PairScorer,
    check_dense_size,
    metrics,
    objective,
    pseudoinverse,
    sherman_morrison_update,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hyperparams:
    """Run parameters.

    Args:
        lam: Fairness weight in ``[0, 1]``.
        k: Number of edges to add.
        epsilon: Approximation error for the sketched path, in ``(0, 1)``.
        seed: Root seed for every random choice.
        multi_group: Add the ``I_O^2`` term when a remainder group exists.
    """

    lam: float
    k: int
    epsilon: float = 0.3
    seed: int = 0
    multi_group: bool = False

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValidationError(f"lambda must lie in [0, 1], got {self.lam}")
        if int(self.k) != self.k or self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValidationError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    def check_budget(self, g: Graph):
        if self.k > g.num_non_edges():
            raise BudgetTooLarge(f"k={self.k} exceeds the {g.num_non_edges()} available non-edges")


@dataclass
class RunRecord:
    iteration: int
    edge: tuple | None
    R: float
    I_S: float
    I_T: float
    U: float
    F: float
    elapsed: float = 0.0
    I_O: float = float("nan")
    approximate: bool = False
    hull_size: int = -1

    def recompute_F(self, lam, multi_group=False) -> float:
        extra = self.I_O ** 2 if multi_group and not math.isnan(self.I_O) else 0.0
        return (1.0 - lam) * self.R + lam * (self.I_S ** 2 + self.I_T ** 2 + extra)


@dataclass
class EdgeSelection:
    """Selected edges in order plus one record per iteration.

    ``initial`` holds the metrics of the unmodified graph (iteration 0).
    """

    edges: list
    records: list
    lam: float
    initial: RunRecord | None = None
    algorithm: str = ""
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.edges)

    @property
    def final(self) -> RunRecord:
        return self.records[-1] if self.records else self.initial

    def all_records(self) -> list:
        return ([self.initial] if self.initial is not None else []) + list(self.records)

    def check_invariants(self, g: Graph) -> None:
        seen = set()
        for e in self.edges:
            assert e[0] < e[1]
            assert not g.has_edge(*e), f"{e} was already an edge"
            assert e not in seen, f"{e} selected twice"
            seen.add(e)
        fs = [r.F for r in self.all_records()]
        assert all(b < a for a, b in zip(fs, fs[1:])), "objective did not strictly decrease"


def make_record(p: DensePinv, ga, lam, iteration, edge, elapsed, multi_group=False) -> RunRecord:
    m = metrics(p, ga, lam, multi_group)
    return RunRecord(iteration=iteration, edge=edge, R=m.R, I_S=m.I_S, I_T=m.I_T, U=m.U,
                     F=m.F, elapsed=elapsed, I_O=m.I_O)


def argmax_lexicographic(scores: np.ndarray, rtol=TOL.tie_rtol) -> int:
    """Index of the maximum; near-ties go to the lowest index.

    Candidates are kept in lexicographic pair order, so the lowest index is
    the lexicographically smallest pair.
    """
    best = scores.max()
    thresh = best - rtol * max(abs(best), 1e-300)
    return int(np.flatnonzero(scores >= thresh)[0])


def _greedy(g: Graph, ga: GroupAssignment, hp: Hyperparams, rank: str, n_max) -> EdgeSelection:
    hp.check_budget(g)
    check_dense_size(g.n, n_max)
    t0 = time.perf_counter()
    p = pseudoinverse(g, n_max)
    initial = make_record(p, ga, hp.lam, 0, None, time.perf_counter() - t0, hp.multi_group)
    cand = non_edge_array(g)
    edges, records = [], []
    for it in range(1, hp.k + 1):
        scorer = PairScorer(p, ga, hp.lam, hp.multi_group)
        u, v = cand[:, 0], cand[:, 1]
        scores = scorer.decrease(u, v) if rank == "exact" else scorer.surrogate(u, v)
        idx = argmax_lexicographic(scores)
        e = (int(cand[idx, 0]), int(cand[idx, 1]))
        cand = np.delete(cand, idx, axis=0)
        p = sherman_morrison_update(p, *e)
        edges.append(e)
        records.append(make_record(p, ga, hp.lam, it, e, time.perf_counter() - t0, hp.multi_group))
        logger.debug("%s iteration %d: edge %s F=%.6g", rank, it, e, records[-1].F)
    name = "exact" if rank == "exact" else "gradient"
    return EdgeSelection(edges, records, hp.lam, initial, name)


def exact_greedy(g: Graph, ga: GroupAssignment, hp: Hyperparams, n_max=DENSE_MAX_NODES) -> EdgeSelection:
    """Add ``k`` edges, each maximizing the exact decrease of the objective.

    The pseudoinverse is computed once and then refreshed with a rank-one
    update after each pick. Ties go to the lexicographically smallest pair.
    """
    return _greedy(g, ga, hp, "exact", n_max)


def gradient_greedy(g: Graph, ga: GroupAssignment, hp: Hyperparams, n_max=DENSE_MAX_NODES) -> EdgeSelection:
    """Like :func:`exact_greedy` but ranks candidates by the gradient surrogate.

    The records still log the true objective.
    """
    return _greedy(g, ga, hp, "gradient", n_max)


TARGETS = ("F", "R", "U")


def _target_values(n, lam, target, tr, sums, sizes):
    """Evaluate the brute-force target from traces and group diagonal sums."""
    access = [n / sizes[i] * sums[i] + tr for i in range(len(sums))]
    if target == "R":
        return tr
    if target == "U":
        return np.abs(access[1] - access[0])
    return (1.0 - lam) * tr + lam * sum(a ** 2 for a in access)


def brute_force_optimum(g: Graph, ga: GroupAssignment, hp: Hyperparams, target="F",
                        cap=BRUTE_FORCE_CAP, method="incremental") -> EdgeSelection:
    """Exhaustive minimizer of ``target`` over all k-subsets of non-edges.

    ``target`` is ``"F"`` (objective), ``"R"`` (graph resistance) or ``"U"``
    (absolute unfairness). Subsets are visited in lexicographic order and a
    later subset only wins if it is strictly better, so ties resolve to the
    lexicographically smallest edge set.

    ``method="fresh"`` recomputes the pseudoinverse for each subset;
    ``"incremental"`` walks the subset tree with rank-one updates and scores
    the last edge of every subset in closed form, which is the same
    enumeration but orders of magnitude faster.
    """
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}")
    hp.check_budget(g)
    cand = non_edge_array(g)
    total = math.comb(len(cand), hp.k)
    if total > cap:
        raise CombinatorialBlowup(f"{total} subsets exceed the cap of {cap}")
    check_dense_size(g.n)
    t0 = time.perf_counter()
    groups = ga.groups(hp.multi_group)
    sizes = np.array([len(x) for x in groups], dtype=float)
    n = g.n

    if method == "fresh":
        best_val, best_set = np.inf, None
        for combo in combinations(range(len(cand)), hp.k):
            p = pseudoinverse(g.with_edges(cand[list(combo)]))
            d = p.diag
            val = float(_target_values(n, hp.lam, target, p.trace,
                                       [d[x].sum() for x in groups], sizes))
            if val < best_val - TOL.tie_rtol * abs(best_val) or best_set is None:
                best_val, best_set = val, combo
    elif method == "incremental":
        best = [np.inf, None]
        p0 = pseudoinverse(g)

        def visit(p, start, chosen):
            depth = len(chosen)
            if depth == hp.k - 1:
                idx = np.arange(start, len(cand))
                if idx.size == 0:
                    return
                scorer = PairScorer(p, ga, hp.lam, hp.multi_group)
                tr, sums = scorer.after(cand[idx, 0], cand[idx, 1])
                vals = _target_values(n, hp.lam, target, tr, sums, sizes)
                j = int(np.argmin(vals))
                jv = vals[j]
                j = int(np.flatnonzero(vals <= jv + TOL.tie_rtol * abs(jv))[0])
                if best[1] is None or vals[j] < best[0] - TOL.tie_rtol * abs(best[0]):
                    best[0], best[1] = float(vals[j]), tuple(chosen) + (int(idx[j]),)
                return
            for i in range(start, len(cand) - (hp.k - 1 - depth)):
                visit(sherman_morrison_update(p, *cand[i]), i + 1, chosen + [i])

        visit(p0, 0, [])
        best_val, best_set = best
    else:
        raise ValueError("method must be 'fresh' or 'incremental'")

    edges = [(int(cand[i, 0]), int(cand[i, 1])) for i in best_set]
    sel = replay(g, ga, edges, hp.lam, hp.multi_group, name=f"optimum-{target}")
    sel.info.update(target=target, value=best_val, subsets=total,
                    seconds=time.perf_counter() - t0)
    return sel


def replay(g: Graph, ga: GroupAssignment, edges, lam, multi_group=False, name="") -> EdgeSelection:
    """Apply ``edges`` in order on the exact kernel and record metrics."""
    t0 = time.perf_counter()
    p = pseudoinverse(g)
    initial = make_record(p, ga, lam, 0, None, 0.0, multi_group)
    records = []
    for it, e in enumerate(edges, 1):
        e = (int(e[0]), int(e[1]))
        p = sherman_morrison_update(p, *e)
        records.append(make_record(p, ga, lam, it, e, time.perf_counter() - t0, multi_group))
    return EdgeSelection([r.edge for r in records], records, lam, initial, name)


@dataclass
class SupermodularityWitness:
    """Sets ``B`` strictly inside ``C`` and an edge ``e`` with
    ``F(B) - F(B + e) < F(C) - F(C + e)``."""

    graph: Graph
    groups: GroupAssignment
    lam: float
    B: list
    C: list
    e: tuple
    F_B: float
    F_Be: float
    F_C: float
    F_Ce: float
    trial: int

    @property
    def gain_B(self):
        return self.F_B - self.F_Be

    @property
    def gain_C(self):
        return self.F_C - self.F_Ce


def _random_connected_graph(rng, n):
    # random spanning tree plus a random number of extra edges
    order = rng.permutation(n)
    edges = [(int(order[i]), int(order[rng.integers(0, i)])) for i in range(1, n)]
    extra = rng.integers(0, n)
    for _ in range(extra):
        u, v = rng.choice(n, 2, replace=False)
        edges.append((int(u), int(v)))
    return Graph(n, edges)


def _random_groups(rng, n):
    labels = rng.integers(0, 2, n)
    labels[rng.choice(n, 2, replace=False)] = [0, 1]
    return GroupAssignment(n, np.flatnonzero(labels == 0), np.flatnonzero(labels == 1))


def set_objective(g: Graph, ga: GroupAssignment, lam, edges) -> float:
    """Objective after adding ``edges``, on a freshly computed pseudoinverse."""
    h = g.with_edges(edges) if len(edges) else g
    return objective(pseudoinverse(h), ga, lam)


def find_nonsupermodular_counterexample(seed: int, max_trials=10**6, lam=0.5, max_nodes=10,
                                        margin=1e-9) -> SupermodularityWitness | None:
    """Random search for a violation of supermodularity of the objective.

    Each trial draws a connected graph with at most ``max_nodes`` nodes, a
    random two-group split, disjoint non-edge sets ``B`` and ``C \\ B`` and a
    further non-edge ``e``. The first trial where the gain of ``e`` on ``C``
    exceeds its gain on ``B`` by more than ``margin`` is returned.
    """
    rng = np.random.default_rng(seed)
    for trial in range(1, max_trials + 1):
        n = int(rng.integers(4, max_nodes + 1))
        g = _random_connected_graph(rng, n)
        cand = non_edge_array(g)
        if len(cand) < 3:
            continue
        ga = _random_groups(rng, n)
        nb = int(rng.integers(0, min(3, len(cand) - 2) + 1))
        nc = int(rng.integers(1, min(3, len(cand) - 1 - nb) + 1))
        picks = rng.choice(len(cand), nb + nc + 1, replace=False)
        pairs = [tuple(int(x) for x in cand[i]) for i in picks]
        B, extra, e = pairs[:nb], pairs[nb:nb + nc], pairs[-1]
        C = B + extra
        f_b = set_objective(g, ga, lam, B)
        f_be = set_objective(g, ga, lam, B + [e])
        f_c = set_objective(g, ga, lam, C)
        f_ce = set_objective(g, ga, lam, C + [e])
        if (f_b - f_be) < (f_c - f_ce) - margin:
            return SupermodularityWitness(g, ga, lam, sorted(B), sorted(C), e,
                                          f_b, f_be, f_c, f_ce, trial)
    return None
