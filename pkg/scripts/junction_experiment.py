"""Corner-half versus middle-half completion scores on random polygons."""
import argparse

from scfield.experiments import junction_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shapes", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--window", type=int, default=5, help="tangent fit window")
    args = ap.parse_args()
    pairs = junction_experiment(args.shapes, args.seed, fit_window=args.window)
    for k, (c, m) in enumerate(pairs):
        print(f"shape {k:2d}: corner {c:.4g}  middle {m:.4g}  {'corner' if c > m else 'middle'}")
    wins = sum(c > m for c, m in pairs)
    print(f"corner half wins {wins}/{len(pairs)} ({100 * wins / len(pairs):.0f}%)")


if __name__ == "__main__":
    main()
