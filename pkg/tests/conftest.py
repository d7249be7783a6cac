import numpy as np
import pytest

from fairaccess.graph import Graph, GroupAssignment


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves):
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def random_connected_graph(rng, n, extra=None):
    """Random spanning tree plus ``extra`` random chords."""
    order = rng.permutation(n)
    edges = [(int(order[i]), int(order[rng.integers(0, i)])) for i in range(1, n)]
    extra = int(rng.integers(0, 2 * n)) if extra is None else extra
    for _ in range(extra):
        u, v = rng.choice(n, 2, replace=False)
        edges.append((int(u), int(v)))
    return Graph(n, edges)


def random_groups(rng, n, with_rest=False):
    labels = rng.integers(0, 3 if with_rest else 2, n)
    labels[rng.choice(n, 2, replace=False)] = [0, 1]
    return GroupAssignment(n, np.flatnonzero(labels == 0), np.flatnonzero(labels == 1))


def dense_pinv(g):
    """Reference pseudoinverse via numpy's SVD-based ``pinv``."""
    return np.linalg.pinv(g.laplacian.toarray())


@pytest.fixture
def p3():
    return path_graph(3)


@pytest.fixture
def k3():
    return complete_graph(3)


@pytest.fixture
def p3_groups():
    # S = middle node, T = endpoint 0
    return GroupAssignment(3, [1], [0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one summary line per acceptance criterion."""

    def add(number, ok, detail, warn_only=False):
        status = "PASS" if ok else ("WARN" if warn_only else "FAIL")
        _ACCEPTANCE_LINES.append((number, f"criterion {number:>2}: {status}  {detail}"))

    return add


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
