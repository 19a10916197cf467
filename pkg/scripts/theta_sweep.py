"""Operating-characteristic bands over theta at several cut levels, printed as a table."""

import argparse

from fuzzplan import DistModel, PlanParams, TriangularFuzzy, foc_band
from fuzzplan.bands import DEFAULT_NUS, DEFAULT_THETAS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--base", default="0.02,0.03,0.04")
    ap.add_argument("--plan", default="86,5,1,1,4")
    ap.add_argument("--model", default="poisson")
    args = ap.parse_args()
    base = TriangularFuzzy(*map(float, args.base.split(",")))
    plan = PlanParams(*map(int, args.plan.split(",")))
    pts = foc_band(base, plan, DistModel.parse(args.model), DEFAULT_NUS, DEFAULT_THETAS)
    print("theta  " + "  ".join(f"nu={nu:<15}" for nu in DEFAULT_NUS))
    for theta in DEFAULT_THETAS:
        cells = [p.pa_cut for p in pts if p.theta == theta]
        print(f"{theta:5.2f}  " + "  ".join(f"[{c.lo:.4f},{c.hi:.4f}]" for c in cells))


if __name__ == "__main__":
    main()
