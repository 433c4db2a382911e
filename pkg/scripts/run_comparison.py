#!/usr/bin/env python3
"""Benchmark the two separation routes against the distance oracle.

Generates (or reads) a corpus, runs the direction search and the polar
reduction on every instance, cross-checks both against Frank-Wolfe distances,
and prints per-mode oracle-call statistics.  The interesting comparison is
the mean number of support queries on points outside the body, where the
direction search's query-dependent cuts tend to pay off.

Example:
    python scripts/run_comparison.py --dims 2,3,4,5 --per-dim 20 --out report.json
"""

import argparse
import tempfile
from pathlib import Path

from sepopt import Instance, dump_instance, random_instance
from sepopt.cli import compare_corpus
from sepopt.instances import dumps_canonical


def generate(corpus: Path, dims, per_dim, delta, seed_base):
    corpus.mkdir(parents=True, exist_ok=True)
    for n in dims:
        for i in range(per_dim):
            place = "outside" if i % 2 == 0 else "inside"
            margin = (0.25 if i % 4 == 0 else 0.05) if place == "outside" else 0.1
            seed = seed_base + 1000 * n + i
            body, p = random_instance(n, n + 4, seed, place=place, margin=margin)
            dump_instance(Instance(body, p, delta), corpus / f"n{n}_{place}_s{seed}.json")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", default=None,
                        help="existing corpus directory (otherwise generated)")
    parser.add_argument("--dims", default="2,3,4,5")
    parser.add_argument("--per-dim", type=int, default=20)
    parser.add_argument("--delta", type=float, default=1e-3)
    parser.add_argument("--seed-base", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=2)
    parser.add_argument("--out", default="comparison_report.json")
    args = parser.parse_args()

    if args.corpus:
        corpus = Path(args.corpus)
    else:
        corpus = Path(tempfile.mkdtemp(prefix="sepopt_corpus_"))
        dims = [int(d) for d in args.dims.split(",")]
        generate(corpus, dims, args.per_dim, args.delta, args.seed_base)
        print(f"generated corpus in {corpus}")

    paths = sorted(corpus.glob("*.json"))
    report = compare_corpus(paths, jobs=args.jobs)
    out = Path(args.out)
    out.write_text(dumps_canonical(report.to_dict(), indent=2) + "\n")
    report.write_csv(out.with_suffix(".csv"))

    agg = report.aggregates
    print(f"instances: {agg['instances']}  failed: {agg['failed']}  "
          f"disagreements: {agg['disagreements']}")
    header = f"{'mode':24s} {'mean':>8s} {'median':>8s} {'mean(out)':>10s} {'median(out)':>12s}"
    print(header)
    for mode in ("heuristic_reduction", "standard_reduction"):
        stats = agg[mode]
        print(f"{mode:24s} {stats['mean_calls']:8.2f} {stats['median_calls']:8.1f} "
              f"{stats['mean_calls_outside']:10.2f} {stats['median_calls_outside']:12.1f}")
    print(f"report written to {out} (+ {out.with_suffix('.csv').name})")


if __name__ == "__main__":
    main()
