"""Directed sensing graphs and their incidence matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Base class for invalid graph construction."""


class SelfLoopError(GraphError):
    pass


class VertexIndexError(GraphError, IndexError):
    pass


class DuplicateEdgeError(GraphError):
    pass


@dataclass(frozen=True)
class DirectedGraph:
    """A directed graph on vertices ``0..n_vertices-1``.

    Edge ``(head, tail)`` means agent ``head`` measures the bearing of
    agent ``tail``. Edge order is significant: row ``k`` of every rigidity
    matrix corresponds to ``edges[k]``.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise GraphError(f"n_vertices must be >= 1, got {self.n_vertices}")
        seen = set()
        for k, (h, t) in enumerate(self.edges):
            if not (0 <= h < self.n_vertices and 0 <= t < self.n_vertices):
                raise VertexIndexError(
                    f"edge {k} = ({h}, {t}) has an index outside [0, {self.n_vertices})"
                )
            if h == t:
                raise SelfLoopError(f"edge {k} = ({h}, {t}) is a self-loop")
            if (h, t) in seen:
                raise DuplicateEdgeError(f"edge {k} = ({h}, {t}) appears more than once")
            seen.add((h, t))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def heads(self) -> np.ndarray:
        return np.array([h for h, _ in self.edges], dtype=int)

    @property
    def tails(self) -> np.ndarray:
        return np.array([t for _, t in self.edges], dtype=int)

    def with_edge(self, head: int, tail: int) -> "DirectedGraph":
        return new_graph(self.n_vertices, list(self.edges) + [(head, tail)])


def new_graph(n_vertices: int, edges: Iterable[Sequence[int]]) -> DirectedGraph:
    return DirectedGraph(int(n_vertices), tuple((int(h), int(t)) for h, t in edges))


def complete_graph(n: int) -> DirectedGraph:
    """All ``n(n-1)`` directed edges, ordered lexicographically by (head, tail)."""
    if n < 2:
        raise GraphError(f"complete graph needs n >= 2, got {n}")
    return new_graph(n, [(h, t) for h in range(n) for t in range(n) if h != t])


def incidence_matrix(g: DirectedGraph) -> np.ndarray:
    """``n x m`` matrix with +1 at the head and -1 at the tail of each edge."""
    E = np.zeros((g.n_vertices, g.n_edges))
    cols = np.arange(g.n_edges)
    E[g.heads, cols] = 1.0
    E[g.tails, cols] = -1.0
    return E


def out_incidence_matrix(g: DirectedGraph) -> np.ndarray:
    """``n x m`` 0/1 matrix marking the head (measuring agent) of each edge."""
    Ebar = np.zeros((g.n_vertices, g.n_edges))
    Ebar[g.heads, np.arange(g.n_edges)] = 1.0
    return Ebar


def out_degree(g: DirectedGraph, v: int) -> int:
    if not 0 <= v < g.n_vertices:
        raise VertexIndexError(f"vertex {v} outside [0, {g.n_vertices})")
    return sum(1 for h, _ in g.edges if h == v)


def out_degrees(g: DirectedGraph) -> np.ndarray:
    return np.bincount(g.heads, minlength=g.n_vertices) if g.n_edges else np.zeros(g.n_vertices, int)
