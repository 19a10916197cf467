"""Smallest feasible n per memory length m for k = m plans.

Shows which m produces each ASN when every one of the m previous lots must
be clean, to compare against a published column.
"""

import argparse

from fuzzplan import DistModel, OCRequirement, SearchLimits, design_mds

PAIRS = [(0.001, 0.010), (0.001, 0.015), (0.0025, 0.005), (0.005, 0.010), (0.010, 0.030), (0.010, 0.050)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", default="binomial")
    ap.add_argument("--m-max", type=int, default=10)
    ap.add_argument("--c2-max", type=int, default=25)
    args = ap.parse_args()
    model = DistModel.parse(args.model)
    print("aql     lql     " + " ".join(f"m={m:<5}" for m in range(1, args.m_max + 1)))
    for aql, lql in PAIRS:
        req = OCRequirement.crisp(aql, lql)
        cells = []
        for m in range(1, args.m_max + 1):
            # a search box with m_max = m and the answer restricted to that m
            res = design_mds(req, model, SearchLimits(m_max=m, c2_max=args.c2_max))
            cells.append(str(res.asn) if res.feasible and res.plan.m == m else "-")
        print(f"{aql:<7} {lql:<7} " + " ".join(f"{c:<7}" for c in cells))


if __name__ == "__main__":
    main()
