"""Four routes to one spiked soft-edge law, side by side on an x grid.

Finite-n band sampling, the discretized stochastic Airy operator, the SDE
and (beta = 2) the Painleve formula are evaluated at the same x values.

    python scripts/route_table.py --beta 2 --w 0,inf --n 400 --reps 2000
"""

from __future__ import annotations

import argparse

from spiked_edge.ensembles import SpikeConfig
from spiked_edge.suites import compare_routes, parse_grid, route_cdf


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--beta", type=int, default=2)
    ap.add_argument("--w", default="0")
    ap.add_argument("--x", default="-4:2:0.5")
    ap.add_argument("--model", choices=("gaussian", "wishart"), default="gaussian")
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--p", type=int, default=None)
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--dt", type=float, default=1e-2)
    ap.add_argument("--h", type=float, default=0.01)
    args = ap.parse_args()
    spike = SpikeConfig.parse(args.w)
    x = parse_grid(args.x.replace(" ", ""))
    routes = ["finite-n", "airy", "sde"] + (["painleve"] if args.beta == 2 else [])
    cdfs = {r: route_cdf(r, x, beta=args.beta, w=spike, seed=args.seed, reps=args.reps, model=args.model,
                         n=args.n, p=args.p, dt_base=args.dt, h=args.h, stream0=10_000_000 * j)
            for j, r in enumerate(routes)}
    print("x," + ",".join(routes))
    for i, xv in enumerate(x):
        print(f"{xv:g}," + ",".join(f"{cdfs[r].F[i]:.4f}" for r in routes))
    ref = cdfs["painleve" if "painleve" in cdfs else "sde"]
    for r in routes:
        if cdfs[r] is not ref:
            res = compare_routes(cdfs[r], ref, sigmas=3.0, name=f"{r}-vs-{ref.route}")
            print(f"# {res.name}: max |dF| = {res.statistic:.4f}, max z = {res.details['max_z']:.2f}")


if __name__ == "__main__":
    main()
