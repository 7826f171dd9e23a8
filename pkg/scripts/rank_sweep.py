"""Jacobian-rank completeness of every scheme family over several seeds.

    python scripts/rank_sweep.py --samples 100 --seeds 42 43 44
"""

import argparse
import json

from cavnoise.manifold import completeness_check

TARGETS = {
    "complete": "noisy_one_sided",
    "no_feedback": "no_feedback_sub",
    "no_mirror_loss": "no_mirror_loss_sub",
    "two_sided": "noisy_one_sided",  # no expected rank; reported for reference
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seeds", type=int, nargs="+", default=[42])
    ap.add_argument("--fd-step", type=float, default=1e-6)
    ap.add_argument("--rank-tol", type=float, default=1e-8)
    args = ap.parse_args()

    rows = []
    for family, target in TARGETS.items():
        for seed in args.seeds:
            v = completeness_check(family, args.samples, seed, args.fd_step, args.rank_tol, target)
            rows.append(v.as_dict())
            note = "no expected rank" if family == "two_sided" else f"complete vs {target}: {v.complete}"
            print(f"{family:15s} seed {seed:4d}  rank {v.rank:2d}  fraction {v.fraction:.2f}  "
                  f"min gap {v.min_gap:.2e}  {note}")
    print(json.dumps(rows, indent=1, default=str))


if __name__ == "__main__":
    main()
