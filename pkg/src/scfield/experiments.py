"""Desk-scale experiments shared by ``scripts/`` and the acceptance tests.

Each function returns plain numbers so callers can print, plot or assert.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Field3D, GridSpec, WalkParams
from .keypoints import fragment_keypoints
from .metrics import completion_score, prf
from .oracle import WalkerConfig, simulate_completion_histogram
from .pipeline import complete_in_noise, detect_edges_simple
from .scf import Keypoint, KeypointSet, Role, completion_field, marginalized_field
from .synth import (add_noise, circle_layout, letter_image, polygon_fragments, polygon_halves,
                    random_polygon, square_layout)
from .trace import extract_vector_field, trace_path


# -- collinear pair -----------------------------------------------------------

@dataclass(frozen=True)
class Collinear:
    spec: GridSpec = GridSpec(32, 32, 36)
    x0: float = 8.0
    x1: float = 24.0
    y: float = 16.0

    def keypoints(self) -> KeypointSet:
        return KeypointSet([Keypoint(self.x0, self.y, 0.0, role=Role.SOURCE),
                            Keypoint(self.x1, self.y, 0.0, role=Role.SINK)])

    def params(self) -> WalkParams:
        return WalkParams.default(self.spec)

    def field(self) -> Field3D:
        return completion_field(self.keypoints(), self.spec, self.params())


def pearson_above(a: np.ndarray, b: np.ndarray, ref: np.ndarray, rel: float = 1e-6) -> float:
    """Correlation of ``a`` and ``b`` over the cells where ``ref`` exceeds ``rel`` of its peak."""
    sel = ref > rel * ref.max()
    return float(np.corrcoef(a[sel], b[sel])[0, 1])


def oracle_agreement(n_walkers: int = 10**6, seed: int = 0, setup: Collinear = Collinear()):
    """Correlation between the completion field and the accepted-walker histogram.

    Returns (correlation, field, histogram).
    """
    c = setup.field()
    cfg = WalkerConfig(n_walkers, seed, setup.params())
    h = simulate_completion_histogram(setup.keypoints(), setup.spec, cfg)
    cv = c.values / c.values.max()
    hv = h.values / h.values.max()
    return pearson_above(cv, hv, cv), c, h


def column_argmax_offsets(collapsed: np.ndarray, columns, line_y: float,
                          rows: slice = slice(None)) -> np.ndarray:
    """Offset of each column's argmax row from ``line_y`` (rows restricted to ``rows``)."""
    start = rows.start or 0
    return np.array([start + int(np.argmax(collapsed[rows, x])) - line_y for x in columns])


def segment_distance(points: np.ndarray, a, b) -> np.ndarray:
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    v = b - a
    t = np.clip(((points - a) @ v) / (v @ v), 0.0, 1.0)
    return np.linalg.norm(points - (a + t[:, None] * v), axis=1)


def straight_line_report(c: Field3D, a, b, rows: slice = slice(None)) -> dict:
    """Criterion-4 style check of a horizontal or vertical completion between ``a`` and ``b``.

    Returns the worst per-line argmax offset across the gap and the worst
    distance of the traced path from the segment.
    """
    collapsed = c.max_over_theta()
    (ax, ay), (bx, by) = a, b
    if ay == by:
        lo, hi = sorted((int(round(ax)), int(round(bx))))
        offs = column_argmax_offsets(collapsed, range(lo + 1, hi), ay, rows)
    elif ax == bx:
        lo, hi = sorted((int(round(ay)), int(round(by))))
        offs = column_argmax_offsets(collapsed.T, range(lo + 1, hi), ax, rows)
    else:
        raise ValueError("straight_line_report handles axis-aligned gaps only")
    path = trace_path(extract_vector_field(c), a, b)
    dev = segment_distance(path.as_array(), a, b)
    return dict(max_argmax_offset=float(np.abs(offs).max()), path_deviation=float(dev.max()),
                converged=path.converged)


# -- toy figures ---------------------------------------------------------------

TOY_SPEC = GridSpec(64, 64, 36)


def circle_experiment(cx: float = 32.0, cy: float = 32.0, radius: float = 22.0,
                      gap_deg: float = 60.0, spec: GridSpec = TOY_SPEC) -> list[dict]:
    """Three gaps on a circle: per gap, trace across it and measure radial deviation."""
    kps = circle_layout(cx, cy, radius, n_gaps=3, gap_deg=gap_deg)
    c = marginalized_field(kps, spec, WalkParams.default(spec))
    vf = extract_vector_field(c)
    out = []
    for g in range(3):
        a, b = kps[2 * g], kps[2 * g + 1]
        path = trace_path(vf, (a.x, a.y), (b.x, b.y))
        pts = path.as_array()
        r = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
        dev = np.abs(r - radius) / radius
        out.append(dict(converged=path.converged, mean_dev=float(dev.mean()),
                        max_dev=float(dev.max())))
    return out


def square_experiment(x0: float = 12.0, y0: float = 12.0, side: float = 40.0, gap: float = 30.0,
                      spec: GridSpec = TOY_SPEC) -> list[dict]:
    """Gaps centred on the four sides of a square; straight-line report per side.

    Argmax search for a side is restricted to the half of the grid on that
    side so the opposite side's ridge cannot win.
    """
    kps = square_layout(x0, y0, side, gap)
    c = marginalized_field(kps, spec, WalkParams.default(spec))
    h = spec.height_cells // 2
    w = spec.width_cells // 2
    halves = [slice(0, h), slice(w, None), slice(h, None), slice(0, w)]
    out = []
    for s in range(4):
        a, b = kps[2 * s], kps[2 * s + 1]
        out.append(straight_line_report(c, (a.x, a.y), (b.x, b.y), halves[s]))
    return out


# -- corner vs middle halves ----------------------------------------------------

def junction_experiment(n_shapes: int = 20, seed: int = 0, size: int = 64, radius: float = 26.0,
                        corner_fraction: float = 0.25, fit_window: int = 5,
                        theta_cells: int = 36) -> list[tuple[float, float]]:
    """Per polygon: (score of the corner-half completion, score of the middle-half one).

    Each half is kept in turn, its fragment endpoints are marginalized into a
    field, and the field is scored against the other (missing) half.
    """
    spec = GridSpec(size, size, theta_cells)
    params = WalkParams.default(spec)
    rng = np.random.default_rng(seed)
    centre = ((size - 1) / 2.0, (size - 1) / 2.0)
    out = []
    for _ in range(n_shapes):
        verts = random_polygon(rng, centre, radius)
        corners, middles = polygon_halves(verts, (size, size), corner_fraction)
        corner_frags, middle_frags = polygon_fragments(verts, corner_fraction)
        scores = []
        for frags, missing in ((corner_frags, middles), (middle_frags, corners)):
            kps, _ = fragment_keypoints(frags, fit_window)
            c = marginalized_field(kps, spec, params)
            scores.append(completion_score(c, missing).score)
        out.append((scores[0], scores[1]))
    return out


# -- noise pipeline ------------------------------------------------------------------

def noise_experiment(seeds=range(5), letter: str = "A", size: int = 128, sigma: float = 0.39,
                     tolerance: int = 2, threshold: float = 0.3) -> list[tuple[float, float]]:
    """Per seed: (F1 of complete_in_noise, F1 of full-resolution detect_edges_simple)."""
    img, truth = letter_image(letter, size)
    out = []
    for seed in seeds:
        noisy = add_noise(img, sigma, seed)
        ours = complete_in_noise(noisy)
        base = detect_edges_simple(noisy, threshold)
        out.append((prf(ours, truth, tolerance).f1, prf(base, truth, tolerance).f1))
    return out


def radial_deviation(points: np.ndarray, cx: float, cy: float, radius: float) -> np.ndarray:
    return np.abs(np.hypot(points[:, 0] - cx, points[:, 1] - cy) - radius) / radius


def angle_between(a: float, b: float) -> float:
    """Smallest absolute difference of two angles, radians."""
    return abs((a - b + math.pi) % (2.0 * math.pi) - math.pi)
