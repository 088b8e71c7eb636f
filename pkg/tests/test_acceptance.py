"""Acceptance run: one test per criterion, each printing a PASS/FAIL line.

The lines are also repeated in the pytest terminal summary. Run this file
directly (``python3 tests/test_acceptance.py``) for the bare report.
"""
import sys
import time

import numpy as np
import pytest

from se2rigidity.estimator import gradient_flow_rhs, integrate_many, perturb_truth, true_state
from se2rigidity.framework import (
    Se2Framework,
    angle_diff,
    apply_trivial_motion,
    bearing_rigidity_function,
    is_bearing_congruent,
    is_bearing_equivalent,
)
from se2rigidity.graph import complete_graph, new_graph
from se2rigidity.rigidity import (
    analyze,
    bearing_rigidity_matrix,
    coordinated_rotation_subspace_dim,
    coordinated_rotation_vector,
    edge_length_squared_matrix,
    parallel_rigidity_matrix,
    subspace_angles,
    trivial_motion_basis,
)
from se2rigidity.scenario import builtin_demo
from se2rigidity.testing import (
    compare,
    fd_bearing_jacobian,
    fd_cost_gradient,
    random_estimator_case,
    random_framework,
)

SEEDS = range(20)
RESULTS = []

def report(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  [{number:2d}] {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok

def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0

def criterion_1():
    def run():
        f = builtin_demo("rigid").framework()
        r = analyze(f, 1e-8)
        return r, subspace_angles(r.nullspace_basis, trivial_motion_basis(f)).max()

    (r, angle), dt = timed(run)
    ok = r.bearing_rank == 14 and r.bearing_nullity == 4 and angle <= 1e-6 and dt < 1.0
    detail = f"rank {r.bearing_rank}, nullity {r.bearing_nullity}, max angle {angle:.2e}, {dt:.3f} s"
    return report(1, "rank law on the rigid demo", ok, detail)

def criterion_2():
    def run():
        rng = np.random.default_rng(2)
        worst_r = worst_b = 0.0
        for _ in range(100):
            f = random_framework(rng, int(rng.integers(2, 9)))
            n = f.n
            z = coordinated_rotation_vector(f)
            D = np.diag(edge_length_squared_matrix(f))
            worst_r = max(worst_r, np.abs(parallel_rigidity_matrix(f) @ z[: 2 * n] - D).max())
            worst_b = max(worst_b, np.abs(bearing_rigidity_matrix(f) @ z).max())
        return worst_r, worst_b

    (wr, wb), dt = timed(run)
    ok = wr <= 1e-10 and wb <= 1e-10 and dt < 5.0
    detail = f"max |R z_p - D 1| {wr:.2e}, max |B z| {wb:.2e}, {dt:.3f} s"
    return report(2, "coordinated rotation identities", ok, detail)

def criterion_3():
    rng = np.random.default_rng(3)
    dims = {
        n: [coordinated_rotation_subspace_dim(random_framework(rng, n, graph=complete_graph(n)))
            for _ in range(20)]
        for n in range(2, 7)
    }
    ok = all(d == 1 for ds in dims.values() for d in ds)
    detail = ", ".join(f"K{n}: {sorted(set(ds))}" for n, ds in dims.items())
    return report(3, "complete graphs have a 1-D coordinated rotation space", ok, detail)

def criterion_4():
    rng = np.random.default_rng(4)
    disagree = rigid = 0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        f = random_framework(rng, n, min_out=1, max_out=int(rng.integers(1, n)))
        r = analyze(f, 1e-8)
        disagree += r.rigid_by_theorem != r.rigid_by_corollary
        rigid += r.rigid_by_theorem
    ok = disagree == 0
    return report(4, "rank test agrees with the parallel/rotation test", ok,
                  f"{disagree} disagreements in 200 ({rigid} rigid)")

def criterion_5():
    rng = np.random.default_rng(5)
    flagged = 0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        sink = int(rng.integers(n))
        f = random_framework(rng, n, forbid_out=(sink,))
        r = analyze(f)
        flagged += (not r.rigid_by_theorem and not r.rigid_by_corollary
                    and sink in r.zero_out_degree_vertices)
    return report(5, "zero out-degree means non-rigid", flagged == 100,
                  f"{flagged}/100 reported non-rigid")

def criterion_6():
    def run():
        rng = np.random.default_rng(6)
        worst_b = worst_g = 0.0
        for _ in range(100):
            f = random_framework(rng, int(rng.integers(2, 9)))
            worst_b = max(worst_b, compare(bearing_rigidity_matrix(f), fd_bearing_jacobian(f))[1])
        for _ in range(100):
            f, cfg, s = random_estimator_case(rng)
            b = bearing_rigidity_function(f)
            worst_g = max(worst_g, compare(gradient_flow_rhs(s, b, cfg, f.graph),
                                           -fd_cost_gradient(s, b, cfg, f.graph))[1])
        return worst_b, worst_g

    (wb, wg), dt = timed(run)
    ok = wb <= 1.0 and wg <= 1.0 and dt < 10.0
    detail = f"worst error/allowed: B {wb:.3f}, flow {wg:.3f}, {dt:.2f} s"
    return report(6, "analytic derivatives vs finite differences", ok, detail)

def run_demo(which):
    s = builtin_demo(which)
    f = s.framework()
    cfg = s.estimator_config()
    truth = true_state(f, cfg.iota, cfg.kappa)
    starts = [perturb_truth(f, cfg.iota, cfg.kappa, 0.1, seed) for seed in SEEDS]
    return integrate_many(starts, bearing_rigidity_function(f), cfg, f.graph, truth)

def criterion_7():
    traces, dt = timed(lambda: run_demo("rigid"))
    ep = np.array([tr.cumulative_position_error[-1] for tr in traces])
    emax = np.array([np.abs(tr.bearing_errors[-1]).max() for tr in traces])
    rise = max(np.diff(tr.cost).max() for tr in traces)
    ok = ep.max() <= 1e-3 and emax.max() <= 1e-6 and rise <= 1e-9 and dt < 30.0
    detail = (f"max e_p {ep.max():.2e}, max |e| {emax.max():.2e}, "
              f"max J increase {rise:.2e}, {dt:.2f} s")
    return report(7, "rigid demo converges for 20 seeds", ok, detail)

def criterion_8():
    traces, dt = timed(lambda: run_demo("roto_flexible"))
    ep = np.array([tr.cumulative_position_error[-1] for tr in traces])
    stuck = int(np.sum(ep >= 1e-2))
    return report(8, "roto-flexible demo does not converge", stuck >= 18,
                  f"{stuck}/20 seeds with e_p >= 1e-2 (min {ep.min():.3f}), {dt:.2f} s")

def criterion_9():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(100):
        f = random_framework(rng, int(rng.integers(2, 9)))
        g = apply_trivial_motion(
            f, rng.uniform(-5, 5, 2), float(np.exp(rng.uniform(-2, 2))),
            float(rng.uniform(-np.pi, np.pi)), rng.uniform(-1, 1, 2),
        )
        diff = angle_diff(bearing_rigidity_function(f), bearing_rigidity_function(g))
        worst = max(worst, np.abs(diff).max())
    return report(9, "bearings invariant under trivial motions", worst <= 1e-10,
                  f"max wrapped difference {worst:.2e}")

def criterion_10():
    g = new_graph(3, [(0, 1), (0, 2), (1, 0), (1, 2)])
    f = Se2Framework(g, [[0.0, 0.0], [1.0, 0.0], [0.4, 0.8]], [0.3, -0.5, 1.0])
    turned = f.with_attitudes(f.attitudes + np.array([0.0, 0.0, 1.1]))
    equivalent = is_bearing_equivalent(f, turned, 1e-12)
    congruent = is_bearing_congruent(f, turned, 1e-6)
    before = analyze(f).rigid
    after = [analyze(f.with_graph(g.with_edge(2, t))).rigid for t in (0, 1)]
    ok = equivalent and not congruent and not before and all(after)
    detail = (f"equivalent {equivalent}, congruent {congruent}, rigid {before}, "
              f"rigid after adding 3->1 / 3->2 {after}")
    return report(10, "triangle with a silent agent", ok, detail)

CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]

@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: c.__name__)
def test_acceptance(criterion):
    assert criterion()

if __name__ == "__main__":
    sys.exit(0 if all([c() for c in CRITERIA]) else 1)
