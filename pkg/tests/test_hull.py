import numpy as np
import pytest

from fairaccess.exceptions import DegenerateInput
from fairaccess.hull import PointSet, approx_ch, diameter_sq, pairwise_sq_distances


def _brute_diameter_sq(X):
    return pairwise_sq_distances(X).max()


def _cover_radius(X, subset):
    return np.sqrt(pairwise_sq_distances(X, X[subset]).min(axis=1).max())


def test_identical_points():
    h = approx_ch(np.ones((5, 3)), 0.1)
    assert h.c >= 1 and h.covering_radius_estimate == 0.0


def test_square_with_centre():
    pts = np.array([[0, 0], [1, 0], [0, 1], [1, 1], [0.5, 0.5]], dtype=float)
    h = approx_ch(pts, 0.1)
    assert {0, 1, 2, 3} <= set(h.indices.tolist())
    assert diameter_sq(pts, h.indices)[1] == pytest.approx(2.0)


def test_degenerate():
    with pytest.raises(DegenerateInput):
        approx_ch(np.zeros((1, 2)), 0.1)
    with pytest.raises(DegenerateInput):
        diameter_sq(np.zeros((1, 2)))


def test_diameter_small():
    assert diameter_sq(np.array([[0.0], [3.0]])) == ((0, 1), 9.0)
    assert diameter_sq(np.array([[0.0], [1.0], [2.0]])) == ((0, 2), 4.0)


def test_diameter_tie_is_lexicographic():
    pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    assert diameter_sq(pts)[0] == (0, 2)


def test_diameter_blocked_matches_brute(rng):
    X = rng.standard_normal((300, 5))
    pair, value = diameter_sq(X, block=64)
    assert value == pytest.approx(_brute_diameter_sq(X))
    d = X[pair[0]] - X[pair[1]]
    assert d @ d == pytest.approx(value)


@pytest.mark.parametrize("prune", [False, True])
def test_coverage_and_diameter(rng, prune):
    eps = 0.2
    for _ in range(10):
        X = rng.standard_normal((int(rng.integers(20, 300)), int(rng.integers(2, 20))))
        h = approx_ch(X, eps, prune=prune)
        assert len(np.unique(h.indices)) == h.c
        full = _brute_diameter_sq(X)
        sub = diameter_sq(X, h.indices)[1]
        assert (1 - eps / 5) * full <= sub <= full * (1 + 1e-12)
        if not prune:
            assert _cover_radius(X, h.indices) <= eps * np.sqrt(sub) + 1e-12
            assert h.covering_radius_estimate == pytest.approx(_cover_radius(X, h.indices), abs=1e-6)


def test_gaussian_cloud():
    X = np.random.default_rng(5).standard_normal((500, 20))
    h = approx_ch(X, 0.2)
    ratio = diameter_sq(X, h.indices)[1] / _brute_diameter_sq(X)
    assert 1 - 0.2 / 5 <= ratio <= 1


def test_deterministic(rng):
    X = rng.standard_normal((100, 4))
    assert np.array_equal(approx_ch(X, 0.1).indices, approx_ch(X, 0.1).indices)


def test_max_size_caps(rng):
    X = rng.standard_normal((200, 10))
    h = approx_ch(X, 0.01, max_size=20)
    assert h.c == 20 and h.capped
    assert not approx_ch(X, 0.01).capped


def test_point_set_validation():
    with pytest.raises(ValueError):
        PointSet(np.zeros(3))
    with pytest.raises(ValueError):
        PointSet(np.zeros((3, 2)), node_ids=[0, 0, 1])
    h = approx_ch(PointSet(np.eye(3)), 0.1)
    assert h.c == 3
