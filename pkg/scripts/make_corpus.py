#!/usr/bin/env python3
"""Generate a corpus of random separation instances as JSON files.

Example:
    python scripts/make_corpus.py --out corpus/ --dims 2,3,4 --per-dim 10 \
        --outside-margin 0.05 --inside-margin 0.1 --delta 1e-3 --seed-base 0
"""

import argparse
from pathlib import Path

from sepopt import Instance, dump_instance, random_instance


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--dims", default="2,3,4", help="comma-separated dimensions")
    parser.add_argument("--per-dim", type=int, default=10,
                        help="instances per dimension (alternating outside/inside)")
    parser.add_argument("--outside-margin", type=float, default=0.05)
    parser.add_argument("--inside-margin", type=float, default=0.1)
    parser.add_argument("--delta", type=float, default=1e-3)
    parser.add_argument("--seed-base", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dims = [int(d) for d in args.dims.split(",")]

    count = 0
    for n in dims:
        for i in range(args.per_dim):
            place = "outside" if i % 2 == 0 else "inside"
            margin = args.outside_margin if place == "outside" else args.inside_margin
            seed = args.seed_base + 1000 * n + i
            body, p = random_instance(n, n + 4, seed, place=place, margin=margin)
            path = out / f"n{n}_{place}_s{seed}.json"
            dump_instance(Instance(body, p, args.delta), path)
            count += 1
    print(f"wrote {count} instances to {out}")


if __name__ == "__main__":
    main()
