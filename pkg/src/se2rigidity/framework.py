"""SE(2) frameworks and the body-frame bearing measurement model.

Angle conventions used throughout the package:

* ``rotation_matrix(psi)`` is the counterclockwise rotation by ``psi``; it
  maps body-frame vectors of an agent with attitude ``psi`` to the world
  frame, so its transpose maps world vectors into the body frame.
* Bearings are ``atan2`` angles wrapped to ``(-pi, pi]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import DirectedGraph, complete_graph

TWO_PI = 2.0 * np.pi


class DegenerateEdgeError(ValueError):
    """A measured pair of agents sits at the same position."""

    def __init__(self, edge_index: int, edge: tuple[int, int]):
        self.edge_index = edge_index
        self.edge = edge
        super().__init__(
            f"edge {edge_index} = {edge}: endpoints coincide, bearing undefined"
        )


class GraphMismatchError(ValueError):
    pass


def wrap(angle):
    """Wrap angles to the half-open interval ``(-pi, pi]``."""
    a = np.asarray(angle, dtype=float)
    out = np.pi - np.mod(np.pi - a, TWO_PI)
    return float(out) if out.ndim == 0 else out


def angle_diff(a, b):
    """Wrapped difference ``a - b``."""
    return wrap(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))


def rotation_matrix(psi: float) -> np.ndarray:
    c, s = np.cos(psi), np.sin(psi)
    return np.array([[c, -s], [s, c]])


def perp(x: np.ndarray) -> np.ndarray:
    """Counterclockwise quarter-turn of 2-vectors along the last axis."""
    x = np.asarray(x, dtype=float)
    return np.stack([-x[..., 1], x[..., 0]], axis=-1)


@dataclass(frozen=True, eq=False)
class Se2Framework:
    """A directed graph with a planar pose ``(x, y, psi)`` at every vertex.

    ``positions`` has shape ``(n, 2)``; ``chi_p`` gives the interleaved
    ``x1, y1, ..., xn, yn`` stacking used for matrix columns.
    """

    graph: DirectedGraph
    positions: np.ndarray
    attitudes: np.ndarray

    def __post_init__(self):
        n = self.graph.n_vertices
        p = np.array(self.positions, dtype=float).reshape(n, 2)
        psi = wrap(np.array(self.attitudes, dtype=float).reshape(n))
        psi = np.atleast_1d(psi)
        if not np.all(np.isfinite(p)):
            raise ValueError("positions must be finite")
        if not np.all(np.isfinite(psi)):
            raise ValueError("attitudes must be finite")
        p.setflags(write=False)
        psi.setflags(write=False)
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "attitudes", psi)
        self.check_edges()

    @property
    def n(self) -> int:
        return self.graph.n_vertices

    @property
    def chi_p(self) -> np.ndarray:
        return self.positions.reshape(-1).copy()

    def edge_vectors(self) -> np.ndarray:
        """World-frame ``p(tail) - p(head)`` for each edge, shape ``(m, 2)``."""
        g = self.graph
        if g.n_edges == 0:
            return np.zeros((0, 2))
        return self.positions[g.tails] - self.positions[g.heads]

    def check_edges(self):
        d = self.edge_vectors()
        if len(d):
            bad = np.flatnonzero(np.hypot(d[:, 0], d[:, 1]) == 0.0)
            if bad.size:
                k = int(bad[0])
                raise DegenerateEdgeError(k, self.graph.edges[k])

    def with_graph(self, graph: DirectedGraph) -> "Se2Framework":
        if graph.n_vertices != self.n:
            raise GraphMismatchError("vertex count differs")
        return Se2Framework(graph, self.positions, self.attitudes)

    def with_attitudes(self, attitudes: Sequence[float]) -> "Se2Framework":
        return Se2Framework(self.graph, self.positions, np.asarray(attitudes, float))

    def __eq__(self, other):
        if not isinstance(other, Se2Framework):
            return NotImplemented
        return (
            self.graph == other.graph
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.attitudes, other.attitudes)
        )

    __hash__ = None


def bearing_vectors(f: Se2Framework) -> np.ndarray:
    """Unit bearing vectors in each measuring agent's body frame, shape ``(m, 2)``."""
    d = f.edge_vectors()
    if not len(d):
        return d
    norms = np.hypot(d[:, 0], d[:, 1])
    psi = f.attitudes[f.graph.heads]
    c, s = np.cos(psi), np.sin(psi)
    # T(psi)^T d
    r = np.stack([c * d[:, 0] + s * d[:, 1], -s * d[:, 0] + c * d[:, 1]], axis=-1)
    return r / norms[:, None]


def bearing_vector(f: Se2Framework, k: int) -> np.ndarray:
    return bearing_vectors(f)[k]


def bearing_rigidity_function(f: Se2Framework) -> np.ndarray:
    """Stacked bearings of all edges in graph edge order."""
    r = bearing_vectors(f)
    return np.atleast_1d(wrap(np.arctan2(r[:, 1], r[:, 0])))


def bearing(f: Se2Framework, k: int) -> float:
    return float(bearing_rigidity_function(f)[k])


def is_bearing_equivalent(f1: Se2Framework, f2: Se2Framework, tol: float = 1e-9) -> bool:
    if f1.graph != f2.graph:
        raise GraphMismatchError("bearing equivalence needs the same graph")
    b1 = bearing_rigidity_function(f1)
    b2 = bearing_rigidity_function(f2)
    return bool(np.all(np.abs(angle_diff(b1, b2)) <= tol))


def is_bearing_congruent(f1: Se2Framework, f2: Se2Framework, tol: float = 1e-9) -> bool:
    """Equivalence on every ordered vertex pair, edges of the graph or not."""
    if f1.n != f2.n:
        raise GraphMismatchError("bearing congruence needs equal vertex counts")
    if f1.n < 2:
        return True
    kn = complete_graph(f1.n)
    return is_bearing_equivalent(f1.with_graph(kn), f2.with_graph(kn), tol)


def apply_trivial_motion(
    f: Se2Framework,
    translation=(0.0, 0.0),
    scale: float = 1.0,
    rotation: float = 0.0,
    pivot=(0.0, 0.0),
) -> Se2Framework:
    """Translate, dilate and rotate the framework, rotating every attitude along."""
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    pivot = np.asarray(pivot, float)
    R = rotation_matrix(rotation)
    p = scale * (f.positions - pivot) @ R.T + pivot + np.asarray(translation, float)
    return Se2Framework(f.graph, p, f.attitudes + rotation)
