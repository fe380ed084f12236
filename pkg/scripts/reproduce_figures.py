"""Regenerate every figure dataset and plot into one directory.

    python scripts/reproduce_figures.py --out figures [--coarse] [--threads 4] [--only fig2 fig20]
"""

import argparse
import time
from pathlib import Path

from nanofiber_emission.figures import FIGURES, make_figure


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("figures"))
    parser.add_argument("--coarse", action="store_true", help="radiation quadrature rtol 1e-3")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--only", nargs="+", choices=list(FIGURES), metavar="FIG")
    args = parser.parse_args()

    start = time.perf_counter()
    for name in args.only or FIGURES:
        t0 = time.perf_counter()
        paths = make_figure(name, args.out, coarse=args.coarse, threads=args.threads)
        print(f"{name:6s} {time.perf_counter() - t0:7.1f} s  {', '.join(str(p) for p in paths.values())}")
    print(f"total {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
