"""Step-size bias of the SDE route against the Painleve route at beta = 2.

For each base step and each (w, x) point the explosion-free fraction of N
paths is compared with F_2(x; w); z is the difference in binomial standard
errors.  The acceptance runs use the largest step that shows no trend.

    python scripts/sde_bias_study.py --N 20000
"""

from __future__ import annotations

import argparse
import math
import time

from spiked_edge.dyson_sde import explosion_counts
from spiked_edge.painleve import make_F2

POINTS = [((-1.0, 1.0), 0.0), ((-1.0, -1.0), 0.0), ((1.0, 1.0), -1.0), ((0.0, 0.0), 0.0),
          ((-1.0,), 0.0), ((1.0,), -1.0), ((-1.0, 0.0), -1.0)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--N", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--dt", default="1e-2,5e-3,2.5e-3")
    args = ap.parse_args()
    F = make_F2()
    print("dt,r,w,x,sde,painleve,z,discarded,seconds")
    for dt in (float(v) for v in args.dt.split(",")):
        for w, x in POINTS:
            t0 = time.perf_counter()
            counts, bad = explosion_counts(args.seed, 2, len(w), [w], x, args.N, dt, stop_after=0)
            ok = counts[~bad, 0] == 0
            p = ok.mean()
            se = math.sqrt(p * (1 - p) / ok.size)
            ref = F(x, list(w))
            print(f"{dt},{len(w)},\"{w}\",{x},{p:.5f},{ref:.6f},{(p - ref) / se:+.2f},{int(bad.sum())},"
                  f"{time.perf_counter() - t0:.1f}", flush=True)


if __name__ == "__main__":
    main()
