import pytest

from chordwalk.graph_core import Graph
from chordwalk.models import (complete_bipartite, complete_graph, cycle_graph,
                              path_graph, petersen_graph, star_graph)


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def k5():
    return complete_graph(5)


@pytest.fixture
def k6():
    return complete_graph(6)


@pytest.fixture
def c4():
    return cycle_graph(4)


@pytest.fixture
def c5():
    return cycle_graph(5)


@pytest.fixture
def c6():
    return cycle_graph(6)


@pytest.fixture
def c7():
    return cycle_graph(7)


@pytest.fixture
def c8():
    return cycle_graph(8)


@pytest.fixture
def c10():
    return cycle_graph(10)


@pytest.fixture
def c20():
    return cycle_graph(20)


@pytest.fixture
def p3():
    # path a - b - c with ids 0, 1, 2
    return path_graph(3)


@pytest.fixture
def k22():
    return complete_bipartite(2, 2)


@pytest.fixture
def k33():
    return complete_bipartite(3, 3)


@pytest.fixture
def petersen():
    return petersen_graph()


@pytest.fixture
def star5():
    return star_graph(5)


@pytest.fixture
def barbell():
    # two K4 blocks joined by a single bridge edge 3 - 4
    edges = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    edges += [(a, b) for a in range(4, 8) for b in range(a + 1, 8)]
    edges.append((3, 4))
    return Graph.from_edges(8, edges)


@pytest.fixture
def two_triangles_bridge():
    return Graph.from_edges(
        6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


def named_small_graphs():
    """The named fixture corpus used by several acceptance criteria."""
    out = [
        ("K4", complete_graph(4)),
        ("K5", complete_graph(5)),
        ("K6", complete_graph(6)),
        ("K12", complete_graph(12)),
        ("C4", cycle_graph(4)),
        ("C5", cycle_graph(5)),
        ("C6", cycle_graph(6)),
        ("C7", cycle_graph(7)),
        ("C8", cycle_graph(8)),
        ("C20", cycle_graph(20)),
        ("P3", path_graph(3)),
        ("K22", complete_bipartite(2, 2)),
        ("K33", complete_bipartite(3, 3)),
        ("K45", complete_bipartite(4, 5)),
        ("petersen", petersen_graph()),
        ("star5", star_graph(5)),
    ]
    edges = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    edges += [(a, b) for a in range(4, 8) for b in range(a + 1, 8)]
    edges.append((3, 4))
    out.append(("barbell", Graph.from_edges(8, edges)))
    out.append(("triangles_bridge", Graph.from_edges(
        6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])))
    return out
