"""Worst constraint residual and inequality slack over seeded draws of each family."""

import argparse
import math

from cavnoise.families import FAMILIES, sample_models
from cavnoise.model import constraint_residuals


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--draws", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    for fam in FAMILIES:
        worst, slack = 0.0, math.inf
        for _, c in sample_models(fam, args.draws, args.seed):
            rep = constraint_residuals(c)
            worst = max(worst, rep.max_abs_residual)
            if rep.min_slack is not None:
                slack = min(slack, rep.min_slack)
        slack_txt = "n/a (two ports)" if math.isinf(slack) else f"{slack:.3e}"
        print(f"{fam:15s} max|residual| {worst:.3e}  min slack {slack_txt}")


if __name__ == "__main__":
    main()
