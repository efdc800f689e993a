"""Rank-one Dirichlet SDE against the Tracy-Widom laws from the Painleve tableau.

beta = 2 is compared with F, beta = 1 with sqrt(F E); neither enters the
SDE, so agreement checks the diffusion, its chart switch and the horizon.

    python scripts/tracy_widom_oracle.py --N 20000
"""

from __future__ import annotations

import argparse
import math

from spiked_edge.dyson_sde import explosion_counts
from spiked_edge.painleve import tracy_widom_F1, tracy_widom_F2


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--N", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=21)
    ap.add_argument("--dt", type=float, default=1e-2)
    ap.add_argument("--x", default="-3,-2,-1,0")
    args = ap.parse_args()
    print("beta,x,sde,tracy_widom,z")
    for beta, law in ((1, tracy_widom_F1), (2, tracy_widom_F2)):
        for x in (float(v) for v in args.x.split(",")):
            counts, bad = explosion_counts(args.seed, beta, 1, [(math.inf,)], x, args.N, args.dt, stop_after=0)
            ok = counts[~bad, 0] == 0
            p = ok.mean()
            ref = float(law(x))
            z = (p - ref) / math.sqrt(ref * (1 - ref) / ok.size)
            print(f"{beta},{x},{p:.5f},{ref:.6f},{z:+.2f}", flush=True)


if __name__ == "__main__":
    main()
