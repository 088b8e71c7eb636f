"""Gradient-flow estimation of unscaled relative positions and attitudes.

Every agent's position is estimated in the body frame of a reference agent
``iota`` and divided by the (unknown) distance between ``iota`` and a scale
agent ``kappa``. Relative attitudes satisfy ``theta_i = psi_iota - psi_i``.

The flow kernels work on stacked state vectors ``[xi (2n) | theta (n)]``
with an optional leading batch axis, so several initial conditions can be
integrated in lock step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .framework import Se2Framework, perp, rotation_matrix, wrap
from .graph import DirectedGraph

INTEGRATORS = ("rk4", "euler")


class EstimatorError(RuntimeError):
    """Integration aborted; ``trace`` holds the samples recorded so far."""

    trace: Optional["TrajectoryTrace"] = None


class EstimateCollapseError(EstimatorError):
    def __init__(self, edge_index, edge, time=None, run=None):
        self.edge_index = edge_index
        self.edge = edge
        self.time = time
        self.run = run
        where = "" if time is None else f" at t={time:.6g}"
        which = "" if run is None else f" (run {run})"
        super().__init__(
            f"estimated endpoints of edge {edge_index} = {edge} collapsed{where}{which}"
        )


class NonFiniteStateError(EstimatorError):
    pass


@dataclass(frozen=True)
class EstimatorConfig:
    iota: int
    kappa: int
    k_e: float = 5.0
    k1: float = 100.0
    k2: float = 100.0
    k3: float = 100.0
    dt: float = 1e-3
    t_final: float = 10.0
    integrator: str = "rk4"
    epsilon_floor: float = 1e-9
    record_stride: int = 1

    def __post_init__(self):
        if self.iota == self.kappa:
            raise ValueError("iota and kappa must be different agents")
        if min(self.k_e, self.k1, self.k2, self.k3) < 0:
            raise ValueError("gains must be nonnegative")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_final < self.dt:
            raise ValueError("t_final must be at least dt")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if not self.epsilon_floor > 0:
            raise ValueError("epsilon_floor must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass
class EstimatorState:
    xi_hat: np.ndarray  # (2n,) interleaved
    theta_hat: np.ndarray  # (n,)

    def __post_init__(self):
        self.xi_hat = np.asarray(self.xi_hat, dtype=float).reshape(-1)
        self.theta_hat = np.asarray(self.theta_hat, dtype=float).reshape(-1)
        if self.xi_hat.size != 2 * self.theta_hat.size:
            raise ValueError("xi_hat must have two entries per agent")
        if not (np.all(np.isfinite(self.xi_hat)) and np.all(np.isfinite(self.theta_hat))):
            raise ValueError("estimator state must be finite")

    @property
    def n(self) -> int:
        return self.theta_hat.size

    @property
    def xi(self) -> np.ndarray:
        return self.xi_hat.reshape(-1, 2)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.xi_hat, self.theta_hat])

    @classmethod
    def from_vector(cls, x) -> "EstimatorState":
        x = np.asarray(x, dtype=float)
        n = x.size // 3
        return cls(x[: 2 * n].copy(), x[2 * n :].copy())


@dataclass
class TrajectoryTrace:
    times: np.ndarray
    xi_hat: np.ndarray  # (T, 2n)
    theta_hat: np.ndarray  # (T, n)
    bearing_errors: np.ndarray  # (T, m)
    cumulative_position_error: np.ndarray  # (T,)
    cost: np.ndarray  # (T,)
    edges: tuple = field(default=())

    def __len__(self):
        return len(self.times)

    @property
    def states(self) -> list:
        return [EstimatorState(x, t) for x, t in zip(self.xi_hat, self.theta_hat)]

    @property
    def final_state(self) -> EstimatorState:
        return EstimatorState(self.xi_hat[-1], self.theta_hat[-1])

    @classmethod
    def empty(cls, n: int, m: int) -> "TrajectoryTrace":
        return cls(
            np.zeros(0), np.zeros((0, 2 * n)), np.zeros((0, n)), np.zeros((0, m)),
            np.zeros(0), np.zeros(0),
        )


# ---------------------------------------------------------------- ground truth


def true_unscaled_positions(f: Se2Framework, iota: int, kappa: int) -> np.ndarray:
    if iota == kappa:
        raise ValueError("iota and kappa must be different agents")
    scale = np.linalg.norm(f.positions[iota] - f.positions[kappa])
    if scale == 0.0:
        raise ValueError("agents iota and kappa coincide; the scale is undefined")
    T = rotation_matrix(f.attitudes[iota])
    xi = (f.positions - f.positions[iota]) @ T / scale
    xi[iota] = 0.0
    return xi.reshape(-1)


def true_relative_attitudes(f: Se2Framework, iota: int) -> np.ndarray:
    theta = np.atleast_1d(wrap(f.attitudes[iota] - f.attitudes))
    theta[iota] = 0.0
    return theta


def true_state(f: Se2Framework, iota: int, kappa: int) -> EstimatorState:
    return EstimatorState(true_unscaled_positions(f, iota, kappa), true_relative_attitudes(f, iota))


def perturb_truth(
    f: Se2Framework, iota: int, kappa: int, magnitude: float, seed: int
) -> EstimatorState:
    """Ground truth plus i.i.d. uniform noise in ``[-magnitude, magnitude]``."""
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    truth = true_state(f, iota, kappa)
    if magnitude == 0:
        return truth
    rng = np.random.default_rng(seed)
    dxi = rng.uniform(-magnitude, magnitude, size=truth.xi_hat.shape)
    dth = rng.uniform(-magnitude, magnitude, size=truth.theta_hat.shape)
    return EstimatorState(truth.xi_hat + dxi, truth.theta_hat + dth)


def cumulative_position_error(s: EstimatorState, truth_xi) -> float:
    truth_xi = np.asarray(truth_xi, dtype=float).reshape(-1)
    if truth_xi.shape != s.xi_hat.shape:
        raise ValueError("state and truth have different agent counts")
    return float(np.sum(np.linalg.norm((s.xi_hat - truth_xi).reshape(-1, 2), axis=1)))


# ---------------------------------------------------------------- flow kernels


class _Kernel:
    """Precomputed graph data for repeated evaluation of e, J and -grad J."""

    def __init__(self, g: DirectedGraph, measured, cfg: EstimatorConfig):
        n = g.n_vertices
        if not (0 <= cfg.iota < n and 0 <= cfg.kappa < n):
            raise ValueError("iota/kappa outside the agent range")
        self.g = g
        self.n = n
        self.cfg = cfg
        self.heads = g.heads
        self.tails = g.tails
        self.measured = np.asarray(measured, dtype=float).reshape(-1)
        if self.measured.size != g.n_edges:
            raise ValueError(
                f"expected {g.n_edges} measured bearings, got {self.measured.size}"
            )
        # scatter matrices: +1 at tail / -1 at head, and 1 at head
        S = np.zeros((n, g.n_edges))
        S[self.tails, np.arange(g.n_edges)] = 1.0
        S[self.heads, np.arange(g.n_edges)] -= 1.0
        self.S = S
        Eb = np.zeros((n, g.n_edges))
        Eb[self.heads, np.arange(g.n_edges)] = 1.0
        self.EbarT = Eb.T.copy()

    def geometry(self, x, time=None):
        n = self.n
        xi = x[..., : 2 * n].reshape(x.shape[:-1] + (n, 2))
        th = x[..., 2 * n :]
        d = xi[..., self.tails, :] - xi[..., self.heads, :]
        l2 = d[..., 0] ** 2 + d[..., 1] ** 2
        floor = self.cfg.epsilon_floor
        if np.any(l2 < floor * floor) or not np.all(np.isfinite(l2)):
            if not np.all(np.isfinite(x)):
                raise NonFiniteStateError(
                    "estimator state became non-finite"
                    + ("" if time is None else f" at t={time:.6g}")
                )
            bad = np.argwhere(l2 < floor * floor)[0]
            k = int(bad[-1])
            run = int(bad[0]) if l2.ndim > 1 else None
            raise EstimateCollapseError(k, self.g.edges[k], time=time, run=run)
        return xi, th, d, l2

    def estimated_bearings(self, x, time=None):
        _, th, d, _ = self.geometry(x, time)
        return wrap(np.arctan2(d[..., 1], d[..., 0]) + th[..., self.heads])

    def error(self, x, time=None):
        return wrap(self.measured - self.estimated_bearings(x, time))

    def cost(self, x, e=None):
        c = self.cfg
        n, i, k = self.n, self.cfg.iota, self.cfg.kappa
        if e is None:
            e = self.error(x)
        xi_i = x[..., 2 * i : 2 * i + 2]
        xi_k = x[..., 2 * k : 2 * k + 2]
        th_i = x[..., 2 * n + i]
        nk = np.sum(xi_k * xi_k, axis=-1)
        return 0.5 * (
            c.k_e * np.sum(e * e, axis=-1)
            + c.k1 * np.sum(xi_i * xi_i, axis=-1)
            + c.k2 * (nk - 1.0) ** 2
            + c.k3 * (1.0 - np.cos(th_i))
        )

    def rhs(self, x, time=None):
        c = self.cfg
        n, i, k = self.n, c.iota, c.kappa
        xi, th, d, l2 = self.geometry(x, time)
        bhat = wrap(np.arctan2(d[..., 1], d[..., 0]) + th[..., self.heads])
        e = wrap(self.measured - bhat)
        # de/dx = -dbhat/dx, so -k_e (de/dx)^T e = k_e (dbhat/dx)^T e
        ke_e = c.k_e * e
        w = perp(d) * (ke_e / l2)[..., None]
        dxi = self.S @ w
        dth = ke_e @ self.EbarT
        dxi[..., i, :] -= c.k1 * xi[..., i, :]
        xk = xi[..., k, :]
        dxi[..., k, :] -= 2.0 * c.k2 * (np.sum(xk * xk, axis=-1) - 1.0)[..., None] * xk
        dth[..., i] -= 0.5 * c.k3 * np.sin(th[..., i])
        return np.concatenate([dxi.reshape(x.shape[:-1] + (2 * n,)), dth], axis=-1)


def _as_vec(s) -> np.ndarray:
    return s.as_vector() if isinstance(s, EstimatorState) else np.asarray(s, dtype=float)


def estimated_bearings(s: EstimatorState, g: DirectedGraph, epsilon_floor: float = 1e-9):
    if g.n_edges == 0:
        return np.zeros(0)
    cfg = EstimatorConfig(iota=0, kappa=1, epsilon_floor=epsilon_floor)
    ker = _Kernel(g, np.zeros(g.n_edges), cfg)
    return np.atleast_1d(ker.estimated_bearings(_as_vec(s)))


def bearing_error(measured, s: EstimatorState, g: DirectedGraph, epsilon_floor: float = 1e-9):
    return np.atleast_1d(wrap(np.asarray(measured, float) - estimated_bearings(s, g, epsilon_floor)))


def cost(s: EstimatorState, measured, cfg: EstimatorConfig, g: DirectedGraph) -> float:
    return float(_Kernel(g, measured, cfg).cost(_as_vec(s)))


def gradient_flow_rhs(s: EstimatorState, measured, cfg: EstimatorConfig, g: DirectedGraph):
    """Negative gradient of the cost with respect to ``[xi_hat | theta_hat]``."""
    return _Kernel(g, measured, cfg).rhs(_as_vec(s))


def error_jacobian(s: EstimatorState, g: DirectedGraph) -> np.ndarray:
    """``de/d[xi_hat | theta_hat]`` as an ``m x 3n`` matrix.

    Equals ``-[D^-1 R_par | Ebar^T]`` evaluated at the estimated positions.
    """
    from .rigidity import bearing_rigidity_matrix

    n = g.n_vertices
    est = Se2Framework(g, s.xi, -s.theta_hat)
    B = bearing_rigidity_matrix(est)
    # attitudes enter the estimate as -theta, flip the chain rule sign
    B[:, 2 * n :] *= -1.0
    return -B


# ---------------------------------------------------------------- integration


def _step(ker: _Kernel, x, t, dt, method):
    if method == "euler":
        return x + dt * ker.rhs(x, t)
    k1 = ker.rhs(x, t)
    k2 = ker.rhs(x + 0.5 * dt * k1, t)
    k3 = ker.rhs(x + 0.5 * dt * k2, t)
    k4 = ker.rhs(x + dt * k3, t)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_many(
    initial_states: Sequence,
    measured,
    cfg: EstimatorConfig,
    g: DirectedGraph,
    truth: Optional[EstimatorState] = None,
) -> list:
    """Integrate several initial conditions in lock step; one trace per run.

    Attitude estimates are wrapped to ``(-pi, pi]`` after every step.
    ``cumulative_position_error`` is NaN when no ``truth`` is given.
    """
    ker = _Kernel(g, measured, cfg)
    n, m = g.n_vertices, g.n_edges
    X = np.stack([_as_vec(s) for s in initial_states])
    if X.shape[-1] != 3 * n:
        raise ValueError("initial state size does not match the graph")
    truth_xi = None if truth is None else truth.xi_hat.reshape(n, 2)

    n_steps = cfg.n_steps
    stride = cfg.record_stride
    n_rec = n_steps // stride + 1
    nb = X.shape[0]
    times = np.zeros(n_rec)
    rec_x = np.zeros((nb, n_rec, 3 * n))
    rec_e = np.zeros((nb, n_rec, m))
    rec_J = np.zeros((nb, n_rec))
    filled = 0

    def record(t, X):
        nonlocal filled
        e = ker.error(X, t)
        times[filled] = t
        rec_x[:, filled] = X
        rec_e[:, filled] = e
        rec_J[:, filled] = ker.cost(X, e)
        filled += 1

    def traces():
        out = []
        for b in range(nb):
            xs = rec_x[b, :filled]
            if truth_xi is None:
                ep = np.full(filled, np.nan)
            else:
                diff = xs[:, : 2 * n].reshape(filled, n, 2) - truth_xi
                ep = np.sum(np.hypot(diff[..., 0], diff[..., 1]), axis=1)
            out.append(
                TrajectoryTrace(
                    times[:filled].copy(), xs[:, : 2 * n].copy(), xs[:, 2 * n :].copy(),
                    rec_e[b, :filled].copy(), ep, rec_J[b, :filled].copy(), tuple(g.edges),
                )
            )
        return out

    try:
        record(0.0, X)
        for step in range(1, n_steps + 1):
            t_prev = (step - 1) * cfg.dt
            X = _step(ker, X, t_prev, cfg.dt, cfg.integrator)
            X[:, 2 * n :] = wrap(X[:, 2 * n :])
            if not np.all(np.isfinite(X)):
                raise NonFiniteStateError(f"estimator state became non-finite at t={step * cfg.dt:.6g}")
            if step % stride == 0:
                record(step * cfg.dt, X)
    except EstimatorError as exc:
        exc.trace = traces()
        raise
    return traces()


def integrate(
    s0: EstimatorState,
    measured,
    cfg: EstimatorConfig,
    g: DirectedGraph,
    truth: Optional[EstimatorState] = None,
) -> TrajectoryTrace:
    """Fixed-step integration of the gradient flow from ``t=0`` to ``cfg.t_final``."""
    try:
        return integrate_many([s0], measured, cfg, g, truth)[0]
    except EstimatorError as exc:
        if isinstance(exc.trace, list):
            exc.trace = exc.trace[0]
        raise
