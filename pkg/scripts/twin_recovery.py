"""Recovery of the hidden renaming by the default configuration, by noise level.

    python scripts/twin_recovery.py --noise 0 0.1 0.2 0.3 0.5
"""

import argparse

from conceptmatch.experiments import run_ablation
from conceptmatch.matcher import MatchConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--noise", type=float, nargs="+", default=[0.0, 0.1, 0.2, 0.3, 0.5])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--n-constants", type=int, default=50)
    ap.add_argument("--n-theorems", type=int, default=300)
    args = ap.parse_args()
    print("noise\tmedian_first_error\tmean_recovered\tmean_seconds")
    for noise in args.noise:
        res = run_ablation(noise, range(args.seeds), args.n_constants, args.n_theorems,
                           configs={"default": MatchConfig()})
        secs = sum(r.seconds for r in res.runs["default"]) / args.seeds
        print(f"{noise}\t{res.median_first_error('default')}\t{res.mean_recovered('default'):.3f}\t{secs:.2f}")


if __name__ == "__main__":
    main()
