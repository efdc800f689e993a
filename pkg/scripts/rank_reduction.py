"""Convergence of F(x; w1, w2) to the rank-one law F(x; w1) as w2 grows.

Uses the Painleve route only.  The gap closes like 1/w2, since a particle
entering at w needs a time of order 1/w to come down.

    python scripts/rank_reduction.py --x -1 --w1 0
"""

from __future__ import annotations

import argparse

from spiked_edge.painleve import make_F2


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--x", type=float, default=-1.0)
    ap.add_argument("--w1", type=float, default=0.0)
    args = ap.parse_args()
    F = make_F2()
    base = F(args.x, [args.w1])
    print(f"# F(x; w1) = {base:.8f}")
    print("w2,F(x;w1,w2),gap,w2*gap")
    for w2 in (2.0, 5.0, 10.0, 20.0, 40.0, 80.0):
        val = F(args.x, [args.w1, w2])
        print(f"{w2:g},{val:.8f},{val - base:+.3e},{w2 * (val - base):+.4f}")


if __name__ == "__main__":
    main()
