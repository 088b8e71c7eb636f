"""Random instance generators and finite-difference oracles.

Shared by the pytest suite, the ``selftest`` CLI command and the scripts.
The oracles only call the forward maps (bearings, cost), never the
closed-form Jacobians they are used to check.
"""

from __future__ import annotations

import numpy as np

from .estimator import EstimatorConfig, EstimatorState, _Kernel, cost
from .framework import Se2Framework, angle_diff, bearing_rigidity_function
from .graph import DirectedGraph, new_graph


def random_positions(rng, n, min_sep=0.15, box=1.0):
    """Uniform points in ``[-box, box]^2`` with pairwise distance >= ``min_sep``."""
    pts = []
    while len(pts) < n:
        p = rng.uniform(-box, box, size=2)
        if all(np.hypot(*(p - q)) >= min_sep for q in pts):
            pts.append(p)
    return np.array(pts)


def random_graph(rng, n, min_out=1, max_out=None, forbid_out=()) -> DirectedGraph:
    """Random digraph; every vertex not in ``forbid_out`` measures ``min_out..max_out`` others."""
    max_out = n - 1 if max_out is None else min(max_out, n - 1)
    min_out = min(min_out, max_out)
    edges = []
    for v in range(n):
        if v in forbid_out:
            continue
        k = rng.integers(min_out, max_out + 1)
        others = [u for u in range(n) if u != v]
        for u in rng.choice(others, size=k, replace=False):
            edges.append((v, int(u)))
    order = rng.permutation(len(edges))
    return new_graph(n, [edges[i] for i in order])


def random_framework(rng, n, graph: DirectedGraph = None, **graph_kw) -> Se2Framework:
    g = graph if graph is not None else random_graph(rng, n, **graph_kw)
    return Se2Framework(g, random_positions(rng, n), rng.uniform(-np.pi, np.pi, size=n))


def _chi(f: Se2Framework) -> np.ndarray:
    return np.concatenate([f.chi_p, f.attitudes])


def _from_chi(g: DirectedGraph, chi) -> Se2Framework:
    n = g.n_vertices
    return Se2Framework(g, chi[: 2 * n].reshape(n, 2), chi[2 * n :])


def fd_bearing_jacobian(f: Se2Framework, h: float = 1e-6) -> np.ndarray:
    """Central differences of the wrapped bearing function."""
    chi = _chi(f)
    J = np.zeros((f.graph.n_edges, chi.size))
    for j in range(chi.size):
        step = np.zeros_like(chi)
        step[j] = h
        bp = bearing_rigidity_function(_from_chi(f.graph, chi + step))
        bm = bearing_rigidity_function(_from_chi(f.graph, chi - step))
        J[:, j] = angle_diff(bp, bm) / (2 * h)
    return J


def fd_cost_gradient(
    s: EstimatorState, measured, cfg: EstimatorConfig, g: DirectedGraph, h: float = 1e-7
) -> np.ndarray:
    x = s.as_vector()
    grad = np.zeros_like(x)
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = h
        jp = cost(EstimatorState.from_vector(x + step), measured, cfg, g)
        jm = cost(EstimatorState.from_vector(x - step), measured, cfg, g)
        grad[j] = (jp - jm) / (2 * h)
    return grad


def random_estimator_case(rng, n=None):
    """A random framework, config and an estimate state near (but off) the truth."""
    from .estimator import true_state

    n = int(rng.integers(3, 8)) if n is None else n
    f = random_framework(rng, n)
    iota, kappa = (int(v) for v in rng.choice(n, size=2, replace=False))
    cfg = EstimatorConfig(
        iota=iota, kappa=kappa,
        k_e=float(rng.uniform(0.5, 10)), k1=float(rng.uniform(1, 100)),
        k2=float(rng.uniform(1, 100)), k3=float(rng.uniform(1, 100)),
    )
    truth = true_state(f, iota, kappa)
    s = EstimatorState(
        truth.xi_hat + rng.normal(scale=0.2, size=2 * n),
        truth.theta_hat + rng.normal(scale=0.5, size=n),
    )
    return f, cfg, s


def compare(analytic, numeric, rtol=1e-5, atol=1e-7):
    """Entrywise ``|a - n| <= max(rtol * |a|, atol)``; zeros of ``a`` get the absolute bound.

    Returns ``(ok, worst_ratio)`` where the ratio is error over allowed error.
    """
    a = np.asarray(analytic, dtype=float)
    num = np.asarray(numeric, dtype=float)
    allowed = np.maximum(rtol * np.abs(a), atol)
    ratio = np.abs(a - num) / allowed
    worst = float(ratio.max()) if ratio.size else 0.0
    return worst <= 1.0, worst


def kernel_for(f: Se2Framework, cfg: EstimatorConfig) -> _Kernel:
    return _Kernel(f.graph, bearing_rigidity_function(f), cfg)
