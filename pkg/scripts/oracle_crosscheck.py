"""Compare the completion field with a Monte Carlo walker histogram on the collinear pair."""
import argparse

import numpy as np

from scfield import io
from scfield.experiments import column_argmax_offsets, oracle_agreement


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--walkers", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--render", help="write field and histogram renderings with this prefix")
    args = ap.parse_args()
    corr, c, h = oracle_agreement(args.walkers, args.seed)
    print(f"pearson(field, histogram) = {corr:.4f}")
    cols = range(9, 24)
    print("field argmax offsets:    ", column_argmax_offsets(c.max_over_theta(), cols, 16).astype(int))
    print("histogram argmax offsets:", column_argmax_offsets(h.max_over_theta(), cols, 16).astype(int))
    if args.render:
        io.write_pgm(f"{args.render}_field.pgm", io.render_field(c))
        io.write_pgm(f"{args.render}_oracle.pgm", io.render_field(h))
    return 0 if np.isfinite(corr) else 1


if __name__ == "__main__":
    raise SystemExit(main())
