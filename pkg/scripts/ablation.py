"""Ablation over scoring scheme, mode and type checking on noisy twin corpora.

    python scripts/ablation.py --noise 0.3 --seeds 10
"""

import argparse

from conceptmatch.experiments import run_ablation


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--noise", type=float, default=0.3)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--n-constants", type=int, default=50)
    ap.add_argument("--n-theorems", type=int, default=300)
    args = ap.parse_args()
    res = run_ablation(args.noise, range(args.seeds), args.n_constants, args.n_theorems)
    print(f"# noise {args.noise}, {args.seeds} seeds, {args.n_constants} constants, "
          f"{args.n_theorems} theorems")
    print(res.table(), end="")


if __name__ == "__main__":
    main()
