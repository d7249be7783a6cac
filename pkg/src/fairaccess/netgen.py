"""Preferential-attachment networks with a minority group and homophily."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import ValidationError
from .graph import Graph, GroupAssignment
from .sketch import as_seed_sequence

MAJORITY, MINORITY = 0, 1


@dataclass(frozen=True)
class BAhParams:
    """Parameters of the homophilic Barabasi-Albert model.

    Args:
        n: Number of nodes.
        m_attach: Edges added with every new node.
        f_a: Probability that a new node joins the minority, in ``[0, 0.5)``.
        h: Homophily; a same-group target has weight ``h * degree`` and a
            cross-group target ``(1 - h) * degree``.
        seed: Root seed.
    """

    n: int
    m_attach: int = 5
    f_a: float = 0.3
    h: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if int(self.m_attach) != self.m_attach or self.m_attach < 1:
            raise ValidationError(f"m_attach must be a positive integer, got {self.m_attach}")
        if int(self.n) != self.n or self.n <= self.m_attach:
            raise ValidationError(f"n must exceed m_attach, got n={self.n}")
        if not 0.0 <= self.f_a < 0.5:
            raise ValidationError(f"f_a must lie in [0, 0.5), got {self.f_a}")
        if not 0.0 <= self.h <= 1.0:
            raise ValidationError(f"h must lie in [0, 1], got {self.h}")

    def as_dict(self) -> dict:
        return asdict(self)


class _EndpointPool:
    """Node ids repeated once per incident edge end; uniform draws are degree-biased."""

    def __init__(self, capacity: int):
        self.buf = np.empty(capacity, dtype=np.int64)
        self.size = 0

    def add(self, node: int, times: int = 1):
        self.buf[self.size:self.size + times] = node
        self.size += times

    def draw(self, rng) -> int:
        return int(self.buf[rng.integers(self.size)])


def _attach_targets(rng, group, pools, counts, degrees, labels, n_existing, m, h):
    """``m`` distinct existing nodes drawn with weight ``h d`` (same group) or ``(1-h) d``."""
    mass = np.array([pools[0].size, pools[1].size], dtype=float)
    w = np.where(np.arange(2) == group, h, 1.0 - h) * mass
    if counts[w > 0].sum() <= m:
        existing = np.arange(n_existing)
        positive = existing[w[labels[:n_existing]] > 0]
        chosen = [int(x) for x in positive]
        # not enough positive-weight nodes: fill by plain degree from the rest
        rest = np.setdiff1d(existing, positive)
        if len(chosen) < m and len(rest):
            p = degrees[rest].astype(float)
            p = p / p.sum() if p.sum() > 0 else None
            extra = rng.choice(rest, size=min(m - len(chosen), len(rest)), replace=False, p=p)
            chosen.extend(int(x) for x in extra)
        return chosen
    chosen = []
    seen = set()
    prob = w / w.sum()
    while len(chosen) < m:
        grp = 0 if rng.random() < prob[0] else 1
        t = pools[grp].draw(rng)
        if t not in seen:
            seen.add(t)
            chosen.append(t)
    return chosen


def generate_bah(p: BAhParams) -> tuple:
    """Sample a connected homophilic preferential-attachment graph.

    Starts from a clique on ``m_attach + 1`` nodes whose groups are coin
    flips (with one node of each group forced), then adds nodes one at a
    time. Each new node joins the minority with probability ``f_a`` and links
    to ``m_attach`` distinct existing nodes, drawn without replacement with
    weights ``h * degree`` for its own group and ``(1 - h) * degree`` for
    the other.

    Returns:
        ``(graph, groups)`` with the majority as ``S`` and the minority as
        ``T``.
    """
    rng = np.random.default_rng(as_seed_sequence(p.seed))
    n, m = int(p.n), int(p.m_attach)
    labels = np.zeros(n, dtype=np.int64)
    degrees = np.zeros(n, dtype=np.int64)
    core = m + 1
    labels[:core] = (rng.random(core) < p.f_a).astype(np.int64)
    if labels[:core].all():
        labels[int(rng.integers(core))] = MAJORITY
    if not labels[:core].any():
        labels[int(rng.integers(core))] = MINORITY
    capacity = 2 * (core * m // 2 + (n - core) * m) + 2
    pools = (_EndpointPool(capacity), _EndpointPool(capacity))
    edges = [(i, j) for i in range(core) for j in range(i + 1, core)]
    degrees[:core] = m
    counts = np.bincount(labels[:core], minlength=2)
    for v in range(core):
        pools[labels[v]].add(v, m)
    for v in range(core, n):
        group = MINORITY if rng.random() < p.f_a else MAJORITY
        labels[v] = group
        targets = _attach_targets(rng, group, pools, counts, degrees, labels, v, m, p.h)
        for t in targets:
            edges.append((t, v))
            degrees[t] += 1
            pools[labels[t]].add(t)
        degrees[v] = len(targets)
        pools[group].add(v, len(targets))
        counts[group] += 1
    g = Graph(n, edges)
    ga = GroupAssignment(n, np.flatnonzero(labels == MAJORITY), np.flatnonzero(labels == MINORITY))
    return g, ga
