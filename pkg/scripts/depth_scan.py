"""Empirical cluster depth of sampled singularities vs network depth.

Draws random regular single-input tanh nets at each depth and reports
whether the eps-cluster depth of the scanned pole cloud matches.
"""
import argparse
import csv
import logging
import sys
import time

import numpy as np

from nnsym.complexan import ScanConfig, empirical_cluster_vs_depth
from nnsym.generators import NetSpec, random_regular
from nnsym.nonlinearity import Tanh

SHAPES = {1: (2,), 2: (2, 1), 3: (2, 1, 1)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", default="42", help="comma-separated rng seeds")
    ap.add_argument("--per-depth", type=int, default=10)
    ap.add_argument("--depths", default="1,2")
    ap.add_argument("--half-width", type=float, default=ScanConfig.half_width)
    ap.add_argument("-v", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.v else logging.WARNING)
    cfg = ScanConfig(half_width=args.half_width)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["seed", "index", "depth", "eps_depth", "matches", "n_points", "by_eps", "seconds"])
    misses = 0
    for seed in map(int, args.seeds.split(",")):
        rng = np.random.default_rng(seed)
        depths = [int(d) for d in args.depths.split(",")]
        nets = [random_regular(rng, Tanh(), NetSpec(n_inputs=1, layers=SHAPES[d]))
                for d in depths for _ in range(args.per_depth)]
        for i, net in enumerate(nets):
            t = time.perf_counter()
            r = empirical_cluster_vs_depth(net, cfg=cfg)
            misses += not r.matches_L
            out.writerow([seed, i, net.depth, r.eps_depth, r.matches_L, len(r.sampled_singularities),
                          " ".join(str(d) for _, d in r.cluster.by_eps), f"{time.perf_counter() - t:.2f}"])
            sys.stdout.flush()
    print(f"# misses: {misses}", file=sys.stderr)


if __name__ == "__main__":
    main()
