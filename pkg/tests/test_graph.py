import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from se2rigidity.graph import (
    DuplicateEdgeError,
    GraphError,
    SelfLoopError,
    VertexIndexError,
    complete_graph,
    incidence_matrix,
    new_graph,
    out_degree,
    out_degrees,
    out_incidence_matrix,
)


def test_smallest_graph():
    g = new_graph(2, [(0, 1)])
    assert g.n_edges == 1
    assert g.edges == ((0, 1),)


def test_reversed_pair_is_two_edges():
    g = new_graph(3, [(0, 1), (1, 0), (1, 2)])
    assert g.n_edges == 3
    assert g.edges[1] == (1, 0)


@pytest.mark.parametrize(
    "n, edges, err",
    [
        (2, [(0, 0)], SelfLoopError),
        (2, [(0, 2)], VertexIndexError),
        (2, [(-1, 0)], VertexIndexError),
        (3, [(0, 1), (1, 2), (0, 1)], DuplicateEdgeError),
        (0, [], GraphError),
    ],
)
def test_validation_errors(n, edges, err):
    with pytest.raises(err):
        new_graph(n, edges)


def test_validation_errors_are_distinct():
    kinds = {SelfLoopError, VertexIndexError, DuplicateEdgeError}
    assert len(kinds) == 3
    assert not issubclass(SelfLoopError, DuplicateEdgeError)


def test_incidence_single_edge():
    E = incidence_matrix(new_graph(2, [(0, 1)]))
    np.testing.assert_array_equal(E, [[1], [-1]])


def test_incidence_k2():
    np.testing.assert_array_equal(incidence_matrix(complete_graph(2)), [[1, -1], [-1, 1]])


def test_out_incidence_single_edge():
    np.testing.assert_array_equal(out_incidence_matrix(new_graph(2, [(0, 1)])), [[1], [0]])


def test_out_incidence_k3_rows():
    Eb = out_incidence_matrix(complete_graph(3))
    np.testing.assert_array_equal(Eb.sum(axis=1), [2, 2, 2])


def test_complete_graph_ordering():
    assert complete_graph(2).edges == ((0, 1), (1, 0))
    assert complete_graph(3).n_edges == 6
    assert complete_graph(6).n_edges == 30
    edges = complete_graph(4).edges
    assert list(edges) == sorted(edges)
    with pytest.raises(GraphError):
        complete_graph(1)


def test_out_degree():
    g = new_graph(3, [(0, 1), (0, 2)])
    assert out_degree(g, 0) == 2
    assert out_degree(g, 2) == 0
    assert all(out_degree(complete_graph(4), v) == 3 for v in range(4))
    with pytest.raises(VertexIndexError):
        out_degree(g, 3)


@st.composite
def digraphs(draw):
    n = draw(st.integers(2, 8))
    pairs = [(h, t) for h in range(n) for t in range(n) if h != t]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return new_graph(n, chosen)


@settings(max_examples=100, deadline=None)
@given(digraphs())
def test_incidence_identities(g):
    E = incidence_matrix(g)
    Eb = out_incidence_matrix(g)
    np.testing.assert_array_equal(E.sum(axis=0), np.zeros(g.n_edges))
    np.testing.assert_array_equal(Eb.sum(axis=0), np.ones(g.n_edges))
    np.testing.assert_array_equal(Eb.T @ np.ones(g.n_vertices), np.ones(g.n_edges))
    assert out_degrees(g).sum() == g.n_edges
    assert sum(out_degree(g, v) for v in range(g.n_vertices)) == g.n_edges
    np.testing.assert_array_equal(Eb.sum(axis=1), out_degrees(g))
