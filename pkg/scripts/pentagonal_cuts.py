"""Acceptance-probability cuts for a pentagonal defect fraction at a ladder of levels."""

import argparse

from fuzzplan import DistModel, PentagonalFuzzy, PlanParams, pa_band


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", default="0.01,0.015,0.02,0.025,0.03")
    ap.add_argument("--plan", default="87,5,1,0,3")
    ap.add_argument("--model", default="binomial")
    args = ap.parse_args()
    fz = PentagonalFuzzy(*map(float, args.points.split(",")))
    plan = PlanParams(*map(int, args.plan.split(",")))
    for i in range(11):
        nu = i / 10
        cut, band = fz.cut(nu), pa_band(fz, nu, plan, DistModel.parse(args.model))
        print(f"nu={nu:.1f}  p in [{cut.lo:.4f}, {cut.hi:.4f}]  Pa in [{band.lo:.4f}, {band.hi:.4f}]")


if __name__ == "__main__":
    main()
