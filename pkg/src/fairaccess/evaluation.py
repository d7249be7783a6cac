"""Comparison metrics between selections and surrogate fidelity data."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .graph import Graph, GroupAssignment, non_edge_array
from .greedy import EdgeSelection
from .kernel import PairScorer, pseudoinverse


def relative_error(reference: float, other: float) -> float:
    """``|reference - other| / |reference|``; zero when both are zero."""
    if reference == other:
        return 0.0
    if reference == 0:
        return math.inf
    return abs(reference - other) / abs(reference)


@dataclass(frozen=True)
class SelectionGap:
    """Final-state relative errors of ``other`` against ``reference``.

    ``eta`` compares graph resistance, ``theta`` compares unfairness.
    """

    eta: float
    theta: float


def selection_gap(reference: EdgeSelection, other: EdgeSelection) -> SelectionGap:
    a, b = reference.final, other.final
    return SelectionGap(relative_error(a.R, b.R), relative_error(a.U, b.U))


def pearson(x, y) -> float:
    """Pearson correlation coefficient; ``nan`` if either series is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("series lengths differ")
    if len(x) < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return float("nan")
    return float(stats.pearsonr(x, y)[0])


@dataclass(frozen=True)
class CorrelationData:
    pairs: np.ndarray
    decrease: np.ndarray
    surrogate: np.ndarray

    @property
    def pearson(self) -> float:
        return pearson(self.decrease, self.surrogate)


def correlation_data(g: Graph, ga: GroupAssignment, lam: float, multi_group=False) -> CorrelationData:
    """Exact decrease and gradient surrogate for every non-edge of ``g``."""
    scorer = PairScorer(pseudoinverse(g), ga, lam, multi_group)
    pairs = non_edge_array(g)
    u, v = pairs[:, 0], pairs[:, 1]
    return CorrelationData(pairs, scorer.decrease(u, v), scorer.surrogate(u, v))
