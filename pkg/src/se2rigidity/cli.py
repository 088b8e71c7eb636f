"""Command line interface.

Exit codes: 0 rigid / converged, 2 not rigid / not converged, 1 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .estimator import EstimatorError, gradient_flow_rhs, true_state
from .framework import DegenerateEdgeError, bearing_rigidity_function
from .rigidity import (
    attitude_coupling_matrix,
    bearing_rigidity_matrix,
    coordinated_rotation_vector,
    edge_length_squared_matrix,
    parallel_rigidity_matrix,
)
from .scenario import (
    EXIT_ERROR,
    EXIT_NEGATIVE,
    EXIT_OK,
    ScenarioError,
    builtin_demo,
    load_scenario,
    run_analysis,
    run_estimation,
    write_scenario,
)
from .testing import compare, fd_bearing_jacobian, fd_cost_gradient, random_estimator_case, random_framework


def _print_estimation(result):
    print(result.files["report"].read_text(), end="")
    for key, path in result.files.items():
        print(f"wrote {path}")


def cmd_analyze(args) -> int:
    s = load_scenario(args.scenario)
    report, text, doc, code = run_analysis(s)
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(text, end="")
    return code


def cmd_estimate(args) -> int:
    s = load_scenario(args.scenario)
    result = run_estimation(s, args.out, seed=args.seed, dt=args.dt, t_final=args.t_final,
                            plots=not args.no_plots)
    _print_estimation(result)
    return result.exit_code


def cmd_demo(args) -> int:
    s = builtin_demo(args.which)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_scenario(s, out / "scenario.yaml")
    print(f"wrote {out / 'scenario.yaml'}")
    result = run_estimation(s, out, seed=args.seed, dt=args.dt, t_final=args.t_final,
                            plots=not args.no_plots)
    _print_estimation(result)
    return result.exit_code


def selftest(trials: int = 20, seed: int = 0, out=None) -> bool:
    """Finite-difference and identity oracles on random instances."""
    rng = np.random.default_rng(seed)
    results = []

    worst = 0.0
    for _ in range(trials):
        f = random_framework(rng, int(rng.integers(2, 9)))
        ok, w = compare(bearing_rigidity_matrix(f), fd_bearing_jacobian(f))
        worst = max(worst, w)
    results.append(("bearing rigidity matrix vs finite differences", worst <= 1.0, worst))

    worst = 0.0
    for _ in range(trials):
        f, cfg, s = random_estimator_case(rng)
        meas = bearing_rigidity_function(f)
        ok, w = compare(gradient_flow_rhs(s, meas, cfg, f.graph), -fd_cost_gradient(s, meas, cfg, f.graph))
        worst = max(worst, w)
    results.append(("flow field vs -finite-difference cost gradient", worst <= 1.0, worst))

    worst = 0.0
    for _ in range(trials):
        f = random_framework(rng, int(rng.integers(2, 9)))
        z = coordinated_rotation_vector(f)
        n = f.n
        r1 = parallel_rigidity_matrix(f) @ z[: 2 * n] - np.diag(edge_length_squared_matrix(f))
        r2 = bearing_rigidity_matrix(f) @ z
        worst = max(worst, np.abs(r1).max(initial=0), np.abs(r2).max(initial=0))
    results.append(("coordinated rotation identities", worst <= 1e-10, worst))

    worst = 0.0
    for _ in range(trials):
        f, cfg, _ = random_estimator_case(rng)
        ts = true_state(f, cfg.iota, cfg.kappa)
        rhs = gradient_flow_rhs(ts, bearing_rigidity_function(f), cfg, f.graph)
        worst = max(worst, np.abs(rhs).max())
    results.append(("true state is an equilibrium", worst <= 1e-12, worst))

    worst = 0.0
    for _ in range(trials):
        f = random_framework(rng, int(rng.integers(2, 9)))
        n = f.n
        B = bearing_rigidity_matrix(f)
        D = np.diag(edge_length_squared_matrix(f))
        fac = np.hstack([parallel_rigidity_matrix(f) / D[:, None],
                         -attitude_coupling_matrix(f) / D[:, None]])
        worst = max(worst, np.abs(B - fac).max(initial=0))
    results.append(("factorization [D^-1 R_par | -Ebar^T]", worst <= 1e-12, worst))

    for name, ok, w in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  (worst {w:.3e})", file=out or sys.stdout)
    return all(ok for _, ok, _ in results)


def cmd_selftest(args) -> int:
    return EXIT_OK if selftest(args.trials, args.seed) else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="se2rigidity",
        description="Rigidity analysis and bearing-only estimation for SE(2) frameworks.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="infinitesimal rigidity report for a scenario")
    a.add_argument("scenario")
    a.add_argument("--json", action="store_true", help="print the machine-readable report")
    a.set_defaults(func=cmd_analyze)

    def sim_opts(q):
        q.add_argument("--out", required=True, help="output directory")
        q.add_argument("--seed", type=int)
        q.add_argument("--dt", type=float)
        q.add_argument("--t-final", dest="t_final", type=float)
        q.add_argument("--no-plots", action="store_true")

    e = sub.add_parser("estimate", help="simulate the gradient-flow estimator")
    e.add_argument("scenario")
    sim_opts(e)
    e.set_defaults(func=cmd_estimate)

    d = sub.add_parser("demo", help="run a built-in 6-agent case study")
    d.add_argument("which", choices=["rigid", "roto-flexible"])
    sim_opts(d)
    d.set_defaults(func=cmd_demo)

    t = sub.add_parser("selftest", help="run the finite-difference and identity oracles")
    t.add_argument("--trials", type=int, default=20)
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, DegenerateEdgeError, EstimatorError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
