"""Randomized exactness audits over a configured base.

    python3 scripts/run_audits.py --config configs/base_z.toml --n 2 3 4 --seed 0
"""

import argparse
import sys

from logkummer.cli import run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default="configs/base_z.toml")
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--sample", default=None, help="comma separated places")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=50)
    args = ap.parse_args()
    worst = 0
    for n in args.n:
        argv = ["--config", args.config, "audit", "--n", str(n), "--seed", str(args.seed), "--samples", str(args.samples)]
        if args.sample:
            argv += ["--sample", args.sample]
        code, outcome, err = run(argv)
        worst = max(worst, code)
        if outcome is None:
            print(f"n={n}: input error: {err}")
            continue
        res = outcome.to_json()["results"]
        print(f"n={n}: exit {code}, sequence passed={res['sequence']['passed']}")
    return worst


if __name__ == "__main__":
    sys.exit(main())
