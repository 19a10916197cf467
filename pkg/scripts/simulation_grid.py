"""Monte Carlo acceptance rates against the analytic value on a small grid of plans.

Besides the binomial standard error, a batch-means error is shown: neighbouring
lots share history, so their decisions are positively correlated.
"""

import argparse

import numpy as np

from fuzzplan import DistModel, InspectionErrors, PlanParams, SimConfig, pa_gmds
from fuzzplan.simulate import decide, draw_defectives

BATCHES = 1000

CASES = [
    (DistModel.BINOMIAL, PlanParams(87, 5, 1, 0, 3), 0.02),
    (DistModel.BINOMIAL, PlanParams(50, 4, 2, 1, 3), 0.04),
    (DistModel.BINOMIAL, PlanParams(60, 3, 3, 0, 2), 0.015),
    (DistModel.POISSON, PlanParams(86, 5, 1, 1, 4), 0.03),
    (DistModel.POISSON, PlanParams(40, 2, 2, 0, 3), 0.03),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lots", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--errors", help="delta1,delta2")
    args = ap.parse_args()
    errs = InspectionErrors(*map(float, args.errors.split(","))) if args.errors else None
    print(f"{'model':9} {'plan':20} {'p':>6} {'analytic':>9} {'simulated':>10} {'z':>6} {'z_batch':>8}")
    for model, plan, p in CASES:
        cfg = SimConfig(p, plan, model, args.lots, seed=args.seed, errors=errs)
        accepted, _ = decide(draw_defectives(cfg, args.jobs), plan)
        kept = accepted[cfg.warmup :].astype(float)
        r = kept.mean()
        naive = np.sqrt(r * (1 - r) / kept.size)
        usable = kept.size // BATCHES * BATCHES
        batch = kept[:usable].reshape(BATCHES, -1).mean(axis=1).std(ddof=1) / np.sqrt(BATCHES)
        want = pa_gmds(errs.apparent(p) if errs else p, plan, model)
        z = (r - want) / naive if naive else 0.0
        zb = (r - want) / batch if batch else 0.0
        label = f"({plan.n},{plan.m},{plan.k},{plan.c1},{plan.c2})"
        print(f"{model.value:9} {label:20} {p:6.3f} {want:9.5f} {r:10.5f} {z:6.2f} {zb:8.2f}")


if __name__ == "__main__":
    main()
