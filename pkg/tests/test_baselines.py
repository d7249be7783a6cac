import networkx as nx
import numpy as np
import pytest

from fairaccess.baselines import (BaselineKind, betweenness, cross_group_non_edges,
                                  fiedler_vector, select_baseline)
from fairaccess.exceptions import InsufficientCandidates
from fairaccess.graph import Graph, GroupAssignment
from fairaccess.greedy import Hyperparams, exact_greedy

from conftest import complete_graph, cycle_graph, path_graph, random_connected_graph, star_graph


def test_parse_aliases():
    assert BaselineKind.parse("DP") is BaselineKind.DEGREE_PRODUCT
    assert BaselineKind.parse("kirmin") is BaselineKind.KIRCHHOFF_GREEDY
    assert BaselineKind.parse("effective_resistance") is BaselineKind.EFFECTIVE_RESISTANCE
    with pytest.raises(ValueError):
        BaselineKind.parse("pagerank")


def test_betweenness_small():
    assert betweenness(path_graph(3)).tolist() == [0.0, 1.0, 0.0]
    b = betweenness(cycle_graph(5))
    assert np.allclose(b, b[0])
    assert betweenness(star_graph(4)).tolist() == [6.0, 0.0, 0.0, 0.0, 0.0]


def test_betweenness_matches_networkx(rng):
    for _ in range(3):
        g = random_connected_graph(rng, 40)
        ref = nx.betweenness_centrality(g.to_networkx(), normalized=False)
        assert np.allclose(betweenness(g, batch=7), [ref[i] for i in range(g.n)])


def test_fiedler_p2_and_p3():
    f = fiedler_vector(path_graph(2))
    assert np.allclose(f, [1 / np.sqrt(2), -1 / np.sqrt(2)], atol=1e-8)
    f = fiedler_vector(path_graph(3))
    assert np.allclose(f, np.array([1, 0, -1]) / np.sqrt(2), atol=1e-6)


@pytest.mark.parametrize("g", [complete_graph(5), random_connected_graph(np.random.default_rng(1), 50)])
def test_fiedler_residual(g):
    L = g.laplacian.toarray()
    f = fiedler_vector(g)
    lam2 = np.linalg.eigvalsh(L)[1]
    assert abs(f.sum()) <= 1e-8 and np.linalg.norm(f) == pytest.approx(1.0)
    assert np.linalg.norm(L @ f - lam2 * f) <= 1e-6


def test_cross_group_non_edges():
    g = path_graph(4)
    ga = GroupAssignment(4, [0, 1], [2, 3])
    assert cross_group_non_edges(g, ga).tolist() == [[0, 2], [0, 3], [1, 3]]


def test_random_is_seeded():
    g = path_graph(8)
    ga = GroupAssignment(8, range(4), range(4, 8))
    a = select_baseline(g, ga, "random", 3, seed=5)
    assert a.edges == select_baseline(g, ga, "random", 3, seed=5).edges
    assert all(e[0] < 4 <= e[1] for e in a.edges)


def test_star_has_no_cross_group_candidates():
    g = star_graph(4)
    with pytest.raises(InsufficientCandidates):
        select_baseline(g, GroupAssignment(5, [0], [1, 2, 3, 4]), "dp", 1)


def test_effective_resistance_on_p4():
    sel = select_baseline(path_graph(4), GroupAssignment(4, [0], [3]), "er", 1)
    assert sel.edges == [(0, 3)]


def test_degree_product_ranking():
    # degrees 2, 3, 2, 2, 1; cross pairs (0,3) and (2,3) tie on product 4
    g = Graph(5, [(0, 1), (0, 2), (1, 2), (1, 3), (3, 4)])
    ga = GroupAssignment(5, [0, 1, 2], [3, 4])
    sel = select_baseline(g, ga, BaselineKind.DEGREE_PRODUCT, 1)
    assert sel.edges == [(0, 3)]
    # sums: (0,3), (1,4), (2,3) all 4, kept in lexicographic order
    sums = select_baseline(g, ga, BaselineKind.DEGREE_SUM, 3).edges
    assert sums == [(0, 3), (1, 4), (2, 3)]


def test_kirchhoff_greedy_is_lambda_zero_greedy(rng):
    g = random_connected_graph(rng, 12)
    ga = GroupAssignment(12, range(6), range(6, 12))
    sel = select_baseline(g, ga, "kirchhoff-greedy", 2, lam=0.5)
    assert sel.edges == exact_greedy(g, ga, Hyperparams(0.0, 2)).edges
    assert sel.lam == 0.5


@pytest.mark.parametrize("kind", ["optimum-r", "optimum-u"])
def test_optimum_baselines_run(kind):
    g = path_graph(5)
    sel = select_baseline(g, GroupAssignment(5, [0, 1], [3, 4]), kind, 1)
    assert len(sel.edges) == 1


@pytest.mark.parametrize("kind", ["dp", "ds", "bp", "bs", "fiedler", "er"])
def test_heuristics_pick_cross_group_non_edges(rng, kind):
    g = random_connected_graph(rng, 20)
    ga = GroupAssignment(20, range(10), range(10, 20))
    sel = select_baseline(g, ga, kind, 3)
    for u, v in sel.edges:
        assert not g.has_edge(u, v) and (u < 10) != (v < 10)
    sel.check_invariants(g)
