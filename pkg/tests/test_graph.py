import numpy as np
import pytest

from fairaccess.exceptions import InvalidPair, ValidationError
from fairaccess.graph import (Graph, GroupAssignment, incidence_vector, load_graph, load_groups,
                              non_edge_array, non_edges, write_graph, write_groups)

from conftest import complete_graph, path_graph, star_graph


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_path(tmp_path):
    g = load_graph(_write(tmp_path, "g.txt", "0 1\n1 2"))
    assert (g.n, g.m) == (3, 2)
    assert g.has_edge(0, 1) and g.has_edge(2, 1) and not g.has_edge(0, 2)


def test_load_collapses_duplicates(tmp_path):
    g = load_graph(_write(tmp_path, "g.txt", "0 1\n1 0\n0 1"))
    assert (g.n, g.m) == (2, 1)


def test_load_rejects_disconnected(tmp_path):
    with pytest.raises(ValidationError):
        load_graph(_write(tmp_path, "g.txt", "0 1\n2 3"))


def test_largest_component(tmp_path):
    g = load_graph(_write(tmp_path, "g.txt", "0 1\n1 2\n5 6"), largest_component=True)
    assert g.n == 3
    assert sorted(g.node_ids.tolist()) == [0, 1, 2]


def test_load_groups_with_remainder(tmp_path):
    g = path_graph(3)
    ga = load_groups(_write(tmp_path, "s.txt", "0 S\n1 T"), g)
    assert ga.S.tolist() == [0] and ga.T.tolist() == [1] and ga.O.tolist() == [2]


@pytest.mark.parametrize("text", ["0 S\n1 S", "0 S\n99 T"])
def test_load_groups_rejects(tmp_path, text):
    with pytest.raises(ValidationError):
        load_groups(_write(tmp_path, "s.txt", text), path_graph(3))


def test_round_trip(tmp_path):
    g = star_graph(3)
    ga = GroupAssignment(4, [0], [1, 2])
    write_graph(g, tmp_path / "g.txt")
    write_groups(g, ga, tmp_path / "s.txt")
    h = load_graph(tmp_path / "g.txt")
    hb = load_groups(tmp_path / "s.txt", h)
    assert np.array_equal(h.edges, g.edges)
    assert hb.S.tolist() == [0] and hb.T.tolist() == [1, 2] and hb.O.tolist() == [3]


def test_non_edges():
    assert list(non_edges(path_graph(3))) == [(0, 2)]
    assert list(non_edges(complete_graph(3))) == []
    assert list(non_edges(star_graph(3))) == [(1, 2), (1, 3), (2, 3)]
    assert non_edge_array(star_graph(3)).tolist() == [[1, 2], [1, 3], [2, 3]]


def test_incidence_vector():
    g = path_graph(3)
    assert incidence_vector(g, 0, 1).tolist() == [1, -1, 0]
    assert incidence_vector(g, 2, 0).tolist() == [-1, 0, 1]
    with pytest.raises(InvalidPair):
        incidence_vector(g, 1, 1)


def test_laplacian_is_incidence_product():
    g = star_graph(4)
    B = g.incidence.toarray()
    assert np.array_equal(B.T @ B, g.laplacian.toarray())


def test_with_edges_is_new_graph():
    g = path_graph(3)
    h = g.with_edges([(0, 2)])
    assert h.m == 3 and g.m == 2


def test_graph_validation():
    with pytest.raises(ValidationError):
        Graph(3, [(0, 0), (1, 2)])
    with pytest.raises(ValidationError):
        Graph(2, [(0, 5)])


def test_group_validation():
    with pytest.raises(ValidationError):
        GroupAssignment(3, [0, 1], [1])
    with pytest.raises(ValidationError):
        GroupAssignment(3, [], [1])
    ga = GroupAssignment.from_labels(["S", "T", "O", "T"])
    assert ga.T.tolist() == [1, 3] and ga.O.tolist() == [2]
