"""Farthest-point coresets and diameters of high-dimensional point sets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInput


@dataclass(frozen=True)
class PointSet:
    """``n`` points in ``R^d``; ``node_ids[i]`` is the graph node of point ``i``."""

    points: np.ndarray
    node_ids: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array")
        object.__setattr__(self, "points", pts)
        ids = np.arange(len(pts)) if self.node_ids is None else np.asarray(self.node_ids)
        if ids.shape != (len(pts),) or len(np.unique(ids)) != len(ids):
            raise ValueError("node_ids must be a bijection onto the points")
        object.__setattr__(self, "node_ids", ids)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class HullSubset:
    indices: np.ndarray
    covering_radius_estimate: float
    diameter: float
    pruned: int = 0
    capped: bool = False

    @property
    def c(self) -> int:
        return len(self.indices)


def _as_points(p) -> np.ndarray:
    return p.points if isinstance(p, PointSet) else np.asarray(p, dtype=np.float64)


class _Distances:
    def __init__(self, X):
        self.X = X
        self.sq = np.einsum("ij,ij->i", X, X)

    def from_point(self, i):
        d = self.sq + self.sq[i] - 2.0 * (self.X @ self.X[i])
        d[i] = 0.0
        return np.maximum(d, 0.0)


def approx_ch(p, eps: float, prune=False, max_size: int | None = None) -> HullSubset:
    """Greedy farthest-point subset covering the point set.

    Starts from a double-sweep diameter pair and repeatedly adds the point
    farthest from the current subset until every point is within
    ``eps * D`` of some subset member, where ``D`` is the diameter of the
    subset (so also within ``eps`` times the diameter of the whole set).

    With ``prune=True`` points that cannot be an endpoint of a pair longer
    than the double-sweep lower bound are excluded up front (a point ``x``
    with ``|x - o| + max_y |y - o|`` below the bound, ``o`` the centroid).
    Only the remaining points are covered, which still contains both
    endpoints of every diameter pair.

    The loop also stops once the subset holds ``max_size`` points. The
    result is then flagged ``capped`` and its covering radius may exceed
    ``eps * D``; the farthest points found first still carry the diameter
    in practice, and the cap keeps the cost linear in ``n``.

    ``diameter`` is the largest distance seen between subset members while
    building, a lower bound on the subset diameter.
    """
    X = _as_points(p)
    n = len(X)
    if n < 2:
        raise DegenerateInput("need at least two points")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    dist = _Distances(X)
    a = int(np.argmax(dist.from_point(0)))
    da = dist.from_point(a)
    b = int(np.argmax(da))
    diam2 = float(da[b])
    if diam2 == 0.0:
        return HullSubset(np.array([a]), 0.0, 0.0)
    db = dist.from_point(b)
    mind = np.minimum(da, db)
    subset = [a, b]
    pruned = 0
    capped = False
    if prune:
        centred = X - X.mean(axis=0)
        radius = np.sqrt(np.einsum("ij,ij->i", centred, centred))
        hopeless = radius + radius.max() < np.sqrt(diam2) * (1.0 - 1e-12)
        mind[hopeless] = -1.0
        pruned = int(hopeless.sum())
    while True:
        j = int(np.argmax(mind))
        if mind[j] <= eps * eps * diam2:
            break
        if max_size is not None and len(subset) >= max_size:
            capped = True
            break
        dj = dist.from_point(j)
        diam2 = max(diam2, float(dj[subset].max()))
        subset.append(j)
        np.minimum(mind, dj, out=mind)
        mind[j] = -1.0 if prune else 0.0
    cover = float(np.sqrt(max(mind.max(), 0.0)))
    return HullSubset(np.asarray(subset), cover, float(np.sqrt(diam2)), pruned, capped)


def pairwise_sq_distances(X: np.ndarray, Y: np.ndarray | None = None) -> np.ndarray:
    Y = X if Y is None else Y
    sx = np.einsum("ij,ij->i", X, X)
    sy = np.einsum("ij,ij->i", Y, Y)
    D = sx[:, None] + sy[None, :] - 2.0 * (X @ Y.T)
    return np.maximum(D, 0.0)


def diameter_sq(p, subset=None, block=1024) -> tuple:
    """Exhaustive farthest pair and its squared distance.

    Returns ``((i, j), value)`` with ``i < j`` point indices; among equal
    distances the lexicographically smallest pair wins.
    """
    X = _as_points(p)
    idx = np.arange(len(X)) if subset is None else np.unique(np.asarray(subset))
    if len(idx) < 2:
        raise DegenerateInput("need at least two points")
    Xs = X[idx]
    best, pair = -1.0, None
    for start in range(0, len(idx), block):
        D = pairwise_sq_distances(Xs[start:start + block], Xs)
        rows = np.arange(start, min(start + block, len(idx)))
        D[np.arange(len(rows))[:, None] >= (np.arange(len(idx))[None, :] - start)] = -1.0
        flat = int(np.argmax(D))
        val = float(D.flat[flat])
        if val > best:
            r, c = divmod(flat, D.shape[1])
            best, pair = val, (int(idx[rows[r]]), int(idx[c]))
    return pair, best
