"""How large an initial perturbation the rigid demo tolerates.

For each magnitude, integrates a batch of seeds and reports how many end
with e_p(t_final) below the convergence tolerance. Collapsed runs count as
failures.

    python3 scripts/perturbation_sweep.py --magnitudes 0.05 0.1 0.2 0.4 0.8
"""
import argparse
from dataclasses import replace

import numpy as np

from se2rigidity.estimator import EstimatorError, integrate_many, perturb_truth, true_state
from se2rigidity.framework import bearing_rigidity_function
from se2rigidity.scenario import builtin_demo


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--magnitudes", type=float, nargs="+", default=[0.05, 0.1, 0.2, 0.4, 0.8])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--t-final", type=float, default=10.0)
    ap.add_argument("--tol", type=float, default=1e-3)
    args = ap.parse_args()

    s = builtin_demo("rigid")
    f = s.framework()
    cfg = replace(s.estimator_config(), t_final=args.t_final, record_stride=100)
    truth = true_state(f, cfg.iota, cfg.kappa)
    measured = bearing_rigidity_function(f)

    print(f"{'magnitude':>9} {'converged':>9} {'median e_p':>11}")
    for mag in args.magnitudes:
        starts = [perturb_truth(f, cfg.iota, cfg.kappa, mag, seed) for seed in range(args.seeds)]
        try:
            traces = integrate_many(starts, measured, cfg, f.graph, truth)
        except EstimatorError as exc:
            # one bad seed stops the whole batch; rerun the seeds one at a time
            print(f"{mag:>9g}  batch aborted ({exc}); running seeds individually")
            traces = []
            for st in starts:
                try:
                    traces += integrate_many([st], measured, cfg, f.graph, truth)
                except EstimatorError:
                    traces.append(None)
        ep = np.array([np.inf if tr is None else tr.cumulative_position_error[-1] for tr in traces])
        ok = int(np.sum(ep <= args.tol))
        print(f"{mag:>9g} {ok:>5}/{len(ep):<3} {np.median(ep):>11.3e}")


if __name__ == "__main__":
    main()
