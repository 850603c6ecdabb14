"""Circle and square gap configurations: trace each gap and report deviations."""
import argparse

from scfield import io
from scfield.experiments import TOY_SPEC, circle_experiment, square_experiment
from scfield.grid import WalkParams
from scfield.scf import marginalized_field
from scfield.synth import circle_layout, square_layout


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--render", help="write renderings of both fields with this prefix")
    args = ap.parse_args()
    for g, rep in enumerate(circle_experiment()):
        print(f"circle gap {g}: converged={rep['converged']} mean radial deviation "
              f"{100 * rep['mean_dev']:.2f}% max {100 * rep['max_dev']:.2f}%")
    for s, rep in enumerate(square_experiment()):
        print(f"square side {s}: converged={rep['converged']} argmax offset "
              f"{rep['max_argmax_offset']:.0f} path deviation {rep['path_deviation']:.3f}")
    if args.render:
        params = WalkParams.default(TOY_SPEC)
        for name, kps in (("circle", circle_layout(32, 32, 22, 3, 60)),
                          ("square", square_layout(12, 12, 40, 30))):
            io.write_pgm(f"{args.render}_{name}.pgm",
                         io.render_field(marginalized_field(kps, TOY_SPEC, params)))


if __name__ == "__main__":
    main()
