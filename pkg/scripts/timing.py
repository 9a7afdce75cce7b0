"""Wall time of a single pass and of an iterative run on large synthetic libraries.

    python scripts/timing.py --n1 1000 --n2 2000 --iterations 100
"""

import argparse

from conceptmatch.experiments import time_scoring


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n1", type=int, default=1000)
    ap.add_argument("--n2", type=int, default=2000)
    ap.add_argument("--iterations", type=int, default=100)
    args = ap.parse_args()
    t = time_scoring(args.n1, args.n2, iterations=args.iterations)
    print(f"constants\t{t.n1} x {t.n2}")
    print(f"generate_s\t{t.generate:.1f}")
    print(f"single_pass_s\t{t.single_pass:.1f}")
    print(f"iterative_s\t{t.iterative:.1f}\t({t.iterations} iterations)")
    print(f"overhead\t{t.overhead:+.0%}")


if __name__ == "__main__":
    main()
