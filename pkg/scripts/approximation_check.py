#!/usr/bin/env python3
"""Exact vs approximate optimum probability on seeded random instances.

Runs both pipelines per instance and writes paired report rows plus per-N
aggregates with the geometric mean of the approx/exact ratio.
"""
import argparse
import json

from dqi_bench.bench import (
    validate_approximation,
    write_aggregate_csv,
    write_report_csv,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-list", default="5,7,9,11,13,15")
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("-o", "--output", default="approximation_check.csv")
    ap.add_argument("--aggregate-out", default="approximation_check_agg.csv")
    args = ap.parse_args()

    n_list = [int(tok) for tok in args.n_list.split(",")]
    rows, aggregates, flagged = validate_approximation(
        n_list,
        instances_per_n=args.instances,
        seed=args.seed,
        samples=args.samples,
        jobs=args.jobs,
    )
    write_report_csv(rows, args.output)
    write_aggregate_csv(aggregates, args.aggregate_out)
    print(json.dumps({
        "rows": len(rows),
        "flagged": flagged,
        "geomean_ratios": {
            a["n_cars"]: round(a["mean"], 4)
            for a in aggregates if a["metric"] == "geomean_p_ratio"
        },
        "output": args.output,
    }))


if __name__ == "__main__":
    main()
