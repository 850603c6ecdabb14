"""Command-line front end.

Exit codes: 0 success, 1 bad input (flags, files, formats), 2 numerical
failure (stability violation, degenerate field), 3 unconverged trace.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import io
from .grid import GridSpec, StabilityError, WalkParams
from .keypoints import fragment_keypoints, mask_keypoints, trace_contours
from .metrics import Normalization, completion_score, prf
from .oracle import (WalkerConfig, simulate_completion_histogram, simulate_sink_histogram,
                     simulate_source_histogram)
from .pipeline import NOISE_DEFAULTS, PipelineConfig, complete_in_noise, guide_contours
from .propagate import BoundaryMode
from .scf import (DegenerateFieldError, Role, completion_field, marginalized_field, sink_field,
                  source_field)
from .trace import extract_vector_field, trace_path

log = logging.getLogger("scfield")

EXIT_INPUT, EXIT_NUMERIC, EXIT_UNCONVERGED = 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _point(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y, got {text!r}")
    return x, y


def _grid(text: str) -> GridSpec:
    try:
        return GridSpec.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _walk_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--keypoints", required=True, help="keypoint file (x y theta_deg role weight)")
    p.add_argument("--grid", type=_grid, default=GridSpec(64, 64, 36), help="WxHxT (default 64x64x36)")
    p.add_argument("--sigma", type=float, help="orientation diffusion, radians (default 0.7*dtheta)")
    p.add_argument("--tau", type=float, help="decay constant (default half the grid diagonal)")
    p.add_argument("--tmax", type=int, help="propagation steps (default 2*(W+H))")
    p.add_argument("--boundary", choices=[m.value for m in BoundaryMode], default="absorbing")
    p.add_argument("--out", required=True, help="output field dump")


def _params(args) -> WalkParams:
    return WalkParams.default(args.grid, args.sigma, args.tau, args.tmax)


def _roles(kps) -> tuple[bool, bool, bool]:
    roles = {kp.role for kp in kps}
    return Role.AUTO in roles, Role.SOURCE in roles, Role.SINK in roles


def cmd_compute(args) -> int:
    kps = io.read_keypoints(args.keypoints)
    if not len(kps):
        raise InputError("keypoint file is empty")
    spec, params, b = args.grid, _params(args), BoundaryMode(args.boundary)
    auto, has_src, has_snk = _roles(kps)
    if auto:
        field = marginalized_field(kps, spec, params, b, args.backend)
    elif has_src and has_snk:
        field = completion_field(kps, spec, params, b, args.backend)
    elif has_src:
        field = source_field(kps, spec, params, b, args.backend)
    else:
        field = sink_field(kps, spec, params, b, args.backend)
    io.save_field(args.out, field)
    if args.render:
        io.write_pgm(args.render, io.render_field(field))
    return 0


def cmd_trace(args) -> int:
    field = io.load_field(args.field)
    vf = extract_vector_field(field)
    path = trace_path(vf, args.from_, args.to, args.step, args.radius, args.max_steps)
    io.write_path(args.out, path)
    if not path.converged:
        print(f"trace did not converge: {path.reason} after {path.steps_taken} steps", file=sys.stderr)
        return EXIT_UNCONVERGED
    return 0


def cmd_keypoints(args) -> int:
    edges = io.read_binary(args.edges)
    if args.mask:
        mask = io.read_binary(args.mask)
        if mask.shape != edges.shape:
            raise InputError(f"mask {mask.shape} and edges {edges.shape} differ in size")
        kps = mask_keypoints(edges, mask, args.window)
    else:
        kps, _ = fragment_keypoints(trace_contours(edges), args.window)
    text = io.format_keypoints(kps)
    # drop the header comment so the file holds exactly one line per keypoint
    with open(args.out, "w") as f:
        f.write("".join(text.splitlines(keepends=True)[1:]))
    return 0


def cmd_oracle(args) -> int:
    kps = io.read_keypoints(args.keypoints)
    auto, has_src, has_snk = _roles(kps)
    if auto or not len(kps):
        raise InputError("the oracle needs explicit source/sink roles")
    spec, b = args.grid, BoundaryMode(args.boundary)
    cfg = WalkerConfig(args.walkers, args.seed, _params(args), args.sink_radius,
                       None if args.sink_window is None else np.radians(args.sink_window))
    if has_src and has_snk:
        field = simulate_completion_histogram(kps, spec, cfg, b)
    elif has_src:
        field = simulate_source_histogram(kps, spec, cfg, b)
    else:
        field = simulate_sink_histogram(kps, spec, cfg, b)
    io.save_field(args.out, field)
    if args.render:
        io.write_pgm(args.render, io.render_field(field))
    return 0


def cmd_pipeline(args) -> int:
    overrides = {k: v for k, v in dict(
        downscale_factor=args.downscale, detector_threshold=args.threshold,
        theta_cells=args.theta_cells, sigma=args.sigma, tau=args.tau, t_max=args.tmax,
        fit_window=args.window).items() if v is not None}
    if args.mode == "guide":
        if not args.mask:
            raise InputError("--mode guide needs --mask")
        edges = io.read_binary(args.image)
        mask = io.read_binary(args.mask)
        completed, paths = guide_contours(edges, mask, PipelineConfig(**overrides))
        if args.paths:
            with open(args.paths, "w") as f:
                for k, path in enumerate(paths):
                    f.write(f"# path {k} converged={int(path.converged)}\n")
                    f.write(io.format_path(path))
    else:
        cfg = PipelineConfig(**{**NOISE_DEFAULTS, **overrides})
        completed = complete_in_noise(io.read_gray(args.image), cfg)
    io.write_binary(args.out, completed)
    return 0


def cmd_score(args) -> int:
    if args.field:
        if not args.missing:
            raise InputError("--field needs --missing")
        rep = completion_score(io.load_field(args.field), io.read_binary(args.missing),
                               Normalization(args.normalization))
        print(rep.record())
    elif args.pred and args.truth:
        print(prf(io.read_binary(args.pred), io.read_binary(args.truth), args.tol).record())
    else:
        raise InputError("give either --field and --missing, or --pred and --truth")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scfield", description="Stochastic completion fields.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="propagate keypoints into a field dump")
    _walk_flags(p)
    p.add_argument("--backend", choices=["fd", "conv"], default="fd")
    p.add_argument("--render", help="optional PGM rendering (dark = high)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("trace", help="trace a path through a field dump")
    p.add_argument("--field", required=True)
    p.add_argument("--from", dest="from_", type=_point, required=True, metavar="X,Y")
    p.add_argument("--to", type=_point, required=True, metavar="X,Y")
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument("--radius", type=float, default=1.5)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("keypoints", help="keypoints from an edge map")
    p.add_argument("--edges", required=True, help="binary PGM (on = value >= 128)")
    p.add_argument("--mask", help="binary PGM; keep only ends touching the mask")
    p.add_argument("--window", type=int, default=5, help="tangent fit window in pixels")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keypoints)

    p = sub.add_parser("oracle", help="Monte Carlo histogram of the same walk")
    _walk_flags(p)
    p.add_argument("--walkers", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sink-radius", type=float, default=0.5)
    p.add_argument("--sink-window", type=float, help="heading window in degrees (default 2 bins)")
    p.add_argument("--render")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("pipeline", help="inpainting guides or edge completion in noise")
    p.add_argument("--image", required=True, help="edge map (guide) or gray image (noise), PGM")
    p.add_argument("--mode", choices=["guide", "noise"], required=True)
    p.add_argument("--mask", help="inpainting mask (guide mode)")
    p.add_argument("--paths", help="write traced guide paths here (guide mode)")
    p.add_argument("--downscale", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--theta-cells", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--tmax", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("score", help="completion score or edge precision/recall")
    p.add_argument("--field")
    p.add_argument("--missing")
    p.add_argument("--normalization", choices=[n.value for n in Normalization], default="raw")
    p.add_argument("--pred")
    p.add_argument("--truth")
    p.add_argument("--tol", type=int, default=2)
    p.set_defaults(func=cmd_score)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (StabilityError, DegenerateFieldError) as e:
        print(f"scfield {args.command}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, ValueError, OSError) as e:
        print(f"scfield {args.command}: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
