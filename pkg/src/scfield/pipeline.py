"""Application flows: inpainting guides and edge completion in noise.

Images are float arrays in [0, 1] indexed ``[y, x]``; binary maps are
boolean arrays of the same layout.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, WalkParams
from .keypoints import ContourFragment, fragment_keypoints, mask_keypoints, trace_contours
from .raster import draw_polyline
from .scf import DegenerateFieldError, KeypointSet, marginalized_field
from .trace import TracedPath, extract_vector_field, rasterize_path, trace_path

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    downscale_factor: int = 4
    detector_threshold: float = 0.3
    theta_cells: int = 36
    # None: the grid defaults of WalkParams.default
    sigma: float | None = None
    tau: float | None = None
    t_max: int | None = None
    step_size: float = 0.5
    radius: float = 1.5
    fit_window: int = 5
    pair_threshold: float = 1e-3
    min_fragment_length: int = 3
    max_pair_distance: float | None = None

    def __post_init__(self):
        if self.downscale_factor < 1:
            raise ValueError("downscale_factor must be >= 1")
        if not 0 < self.detector_threshold < 1:
            raise ValueError("detector_threshold must lie in (0, 1)")

    def walk_params(self, spec: GridSpec) -> WalkParams:
        return WalkParams.default(spec, self.sigma, self.tau, self.t_max)


# noise pipeline defaults: completions only need to bridge gaps of a few
# downscaled pixels, so a short horizon keeps full-resolution fields cheap
NOISE_DEFAULTS = dict(tau=12.0, t_max=48, max_pair_distance=40.0, min_fragment_length=4)


def bisector_strength(magnitude: np.ndarray, a, b) -> float:
    """Strongest field value on the perpendicular bisector of a-b, within half
    the chord length of the chord midpoint.

    A curved completion crosses the bisector away from the chord midpoint, so
    this is the field value midway along the completion, not along the chord.
    """
    h, w = magnitude.shape
    (ax, ay), (bx, by) = a, b
    mx, my = (ax + bx) / 2.0, (ay + by) / 2.0
    length = math.hypot(bx - ax, by - ay)
    if length == 0:
        return float(magnitude[int(math.floor(my + 0.5)), int(math.floor(mx + 0.5))])
    nx, ny = -(by - ay) / length, (bx - ax) / length
    offs = np.arange(-0.5 * length, 0.5 * length + 0.25, 0.5)
    xs = np.floor(mx + offs * nx + 0.5).astype(int)
    ys = np.floor(my + offs * ny + 0.5).astype(int)
    ok = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
    return float(magnitude[ys[ok], xs[ok]].max())


def link_keypoints(kps: KeypointSet, shape: tuple[int, int], cfg: PipelineConfig,
                   exclude=()) -> tuple[np.ndarray, list[TracedPath]]:
    """Marginalized field over ``kps``, then greedy tracing between strong pairs.

    Pairs whose midway field value (see ``bisector_strength``) exceeds
    ``pair_threshold`` of the peak are traced strongest first; each keypoint joins at most one
    completion. Returns the rasterized converged paths and the paths.
    """
    h, w = shape
    out = np.zeros(shape, dtype=bool)
    if len(kps) < 2:
        return out, []
    spec = GridSpec(w, h, cfg.theta_cells)
    try:
        field = marginalized_field(kps, spec, cfg.walk_params(spec), exclude=exclude)
    except DegenerateFieldError:
        log.info("no keypoint pair is connected within the horizon")
        return out, []
    vf = extract_vector_field(field)
    peak = vf.magnitude.max()
    banned = {frozenset(p) for p in exclude}
    cands = []
    for i in range(len(kps)):
        for j in range(i + 1, len(kps)):
            if frozenset((i, j)) in banned:
                continue
            a, b = kps[i], kps[j]
            if cfg.max_pair_distance is not None and math.hypot(a.x - b.x, a.y - b.y) > cfg.max_pair_distance:
                continue
            strength = bisector_strength(vf.magnitude, (a.x, a.y), (b.x, b.y))
            if strength > cfg.pair_threshold * peak:
                cands.append((-strength, i, j))
    cands.sort()
    used: set[int] = set()
    paths = []
    for _, i, j in cands:
        if i in used or j in used:
            continue
        a, b = kps[i], kps[j]
        path = trace_path(vf, (a.x, a.y), (b.x, b.y), cfg.step_size, cfg.radius)
        if not path.converged:
            continue
        used.update((i, j))
        paths.append(path)
        out |= rasterize_path(path, shape, end=(b.x, b.y))
    return out, paths


def guide_contours(edges: np.ndarray, mask: np.ndarray,
                   cfg: PipelineConfig = PipelineConfig()) -> tuple[np.ndarray, list[TracedPath]]:
    """Complete contours across a mask; returns (edges OR completions, paths)."""
    edges = np.asarray(edges, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if edges.shape != mask.shape:
        raise ValueError(f"edge map {edges.shape} and mask {mask.shape} differ in size")
    kps = mask_keypoints(edges, mask, cfg.fit_window)
    if len(kps) < 2:
        return edges.copy(), []
    completions, paths = link_keypoints(kps, edges.shape, cfg)
    return edges | completions, paths


def box_downscale(img: np.ndarray, factor: int) -> np.ndarray:
    """Mean over non-overlapping factor x factor blocks (trailing rows/cols dropped)."""
    img = np.asarray(img, dtype=float)
    if factor == 1:
        return img.copy()
    h, w = img.shape[0] // factor, img.shape[1] // factor
    return img[:h * factor, :w * factor].reshape(h, factor, w, factor).mean(axis=(1, 3))


# unit steps across the edge for the four quantized gradient directions
_SECTOR_STEPS = ((1, 0), (1, 1), (0, 1), (-1, 1))


def _gradient_nms(img: np.ndarray):
    """Gradient magnitude, quantized direction step per pixel, and the
    magnitudes one step behind and ahead along that direction."""
    gy, gx = np.gradient(img)
    mag = np.hypot(gx, gy)
    # quantize the gradient direction to 0, 45, 90, 135 degrees
    ang = np.mod(np.degrees(np.arctan2(gy, gx)), 180.0)
    sector = (np.floor((ang + 22.5) / 45.0).astype(int)) % 4
    padded = np.pad(mag, 1, mode="edge")
    h, w = img.shape
    back = np.empty_like(mag)
    fwd = np.empty_like(mag)
    for s, (dx, dy) in enumerate(_SECTOR_STEPS):
        sel = sector == s
        fwd[sel] = padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w][sel]
        back[sel] = padded[1 - dy:1 - dy + h, 1 - dx:1 - dx + w][sel]
    return mag, sector, back, fwd


def detect_edges_simple(img: np.ndarray, threshold: float = 0.3) -> np.ndarray:
    """Central-difference gradient magnitude, thresholded relative to its
    maximum and thinned by non-maximum suppression across the edge."""
    img = np.asarray(img, dtype=float)
    mag, _, back, fwd = _gradient_nms(img)
    top = mag.max()
    if top == 0:
        return np.zeros(img.shape, dtype=bool)
    strong = (mag >= threshold * top) & (mag > 0)
    # ties on a plateau go to the far side so a step yields one pixel
    return strong & (mag >= back) & (mag > fwd)


def subpixel_offsets(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel (dx, dy) shift to the peak of a parabola through the gradient
    magnitudes behind, at and ahead of the pixel across the edge."""
    mag, sector, back, fwd = _gradient_nms(np.asarray(img, dtype=float))
    curv = back - 2.0 * mag + fwd
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(curv < 0, 0.5 * (back - fwd) / curv, 0.0)
    t = np.clip(t, -0.5, 0.5)
    steps = np.array(_SECTOR_STEPS, dtype=float)[sector]
    return t * steps[..., 0], t * steps[..., 1]


def _upscale_fragments(frags: list[ContourFragment], factor: int,
                       offsets: tuple[np.ndarray, np.ndarray] | None = None) -> list[ContourFragment]:
    off = (factor - 1) / 2.0
    out = []
    for f in frags:
        pts = []
        for x, y in f.pixels:
            sx, sy = (offsets[0][y, x], offsets[1][y, x]) if offsets is not None else (0.0, 0.0)
            pts.append((int(math.floor((x + sx) * factor + off + 0.5)),
                        int(math.floor((y + sy) * factor + off + 0.5))))
        out.append(ContourFragment(pts, f.closed))
    return out


def complete_in_noise(img: np.ndarray, cfg: PipelineConfig | None = None) -> np.ndarray:
    """Downscale, detect, carry fragments back to full size, complete the gaps.

    Fragment pixels move to their sub-pixel edge position before being scaled
    up, so the full-size outline is not biased towards one side of the edge.
    """
    if cfg is None:
        cfg = PipelineConfig(**NOISE_DEFAULTS)
    img = np.asarray(img, dtype=float)
    f = cfg.downscale_factor
    small = box_downscale(img, f)
    frags = [fr for fr in trace_contours(detect_edges_simple(small, cfg.detector_threshold))
             if len(fr) >= cfg.min_fragment_length]
    big = _upscale_fragments(frags, f, subpixel_offsets(small))

    out = np.zeros(img.shape, dtype=bool)
    for fr in big:
        pts = fr.pixels + fr.pixels[:1] if fr.closed else fr.pixels
        draw_polyline(out, pts)
    kps, _ = fragment_keypoints(big, cfg.fit_window, min_length=2)
    completions, _ = link_keypoints(kps, img.shape, cfg)
    return out | completions
