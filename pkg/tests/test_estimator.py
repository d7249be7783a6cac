import numpy as np
import pytest
import scipy.sparse as sp
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fairaccess import FairEdgeAugmenter
from fairaccess.exceptions import ValidationError
from fairaccess.graph import Graph
from fairaccess.validation import check_graph, check_groups, is_adjacency

from conftest import path_graph

P3_ADJ = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])


def test_check_graph_forms():
    edges = np.array([[0, 1], [1, 2]])
    for X in (P3_ADJ, sp.csr_matrix(P3_ADJ), edges, path_graph(3)):
        g = check_graph(X)
        assert g.n == 3 and g.edges.tolist() == [[0, 1], [1, 2]]


def test_two_by_two_ambiguity():
    assert is_adjacency(np.array([[0, 1], [1, 0]]))
    # any other 2x2 array is a two-row edge list
    assert not is_adjacency(np.array([[0, 1], [1, 2]]))
    assert check_graph(np.array([[0, 1], [1, 2]])).n == 3


@pytest.mark.parametrize("X", [np.array([[0, 2], [2, 0]]) * 1.5, np.array([[1, 1], [1, 0]]),
                               np.array([[0, 1, 0], [0, 0, 1], [0, 1, 0]]), np.array([[0, 1, 2]]),
                               np.array([[0.5, 1.0], [1.0, 2.0], [2.0, 3.0]]),
                               np.array([[-1, 0], [0, 1], [1, 2]])])
def test_check_graph_rejects(X):
    with pytest.raises(ValidationError):
        check_graph(X)


def test_check_groups():
    ga = check_groups(["S", "T", "O"], 3)
    assert ga.S.tolist() == [0] and ga.T.tolist() == [1] and ga.O.tolist() == [2]
    assert check_groups([0, 1, 1], 3).T.tolist() == [1, 2]
    for bad in (["S", "T"], [0, 1, 5], ["S", "X", "T"], None):
        with pytest.raises(ValidationError):
            check_groups(bad, 3)


@pytest.mark.parametrize("X", [P3_ADJ, sp.csr_matrix(P3_ADJ), np.array([[0, 1], [1, 2]]),
                               path_graph(3)])
def test_fit_transform_keeps_representation(X):
    est = FairEdgeAugmenter(k=1, lam=0.0)
    out = est.fit_transform(X, ["T", "S", "S"])
    assert est.selected_edges_.tolist() == [[0, 2]]
    assert est.records_[-1].R == pytest.approx(2 / 3)
    if isinstance(X, Graph):
        assert out.m == 3
    elif sp.issparse(X):
        assert sp.issparse(out) and out.nnz == 6
    elif X.shape == (3, 3):
        assert out.tolist() == [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    else:
        assert out.tolist() == [[0, 1], [0, 2], [1, 2]]


def test_not_fitted():
    with pytest.raises(NotFittedError):
        FairEdgeAugmenter().transform(P3_ADJ)


def test_clone_and_params():
    est = FairEdgeAugmenter(k=2, algorithm="fast", epsilon=0.2)
    c = clone(est)
    assert c.get_params() == est.get_params()
    assert not hasattr(c, "selected_edges_")


@pytest.mark.parametrize("algorithm", ["exact", "gradient", "fast", "baseline:er"])
def test_algorithms(algorithm):
    X = np.array([[i, i + 1] for i in range(7)])
    y = ["S"] * 4 + ["T"] * 4
    est = FairEdgeAugmenter(k=2, algorithm=algorithm).fit(X, y)
    assert est.selected_edges_.shape == (2, 2)
    assert est.n_nodes_ == 8


def test_bad_algorithm_and_seed():
    with pytest.raises(ValidationError):
        FairEdgeAugmenter(k=1, algorithm="magic").fit(P3_ADJ, [0, 1, 0])
    with pytest.raises(ValidationError):
        FairEdgeAugmenter(k=1, random_state="x").fit(P3_ADJ, [0, 1, 0])


def test_transform_node_count_mismatch():
    est = FairEdgeAugmenter(k=1).fit(P3_ADJ, [0, 1, 0])
    with pytest.raises(ValidationError):
        est.transform(path_graph(4).adjacency_matrix.toarray())
