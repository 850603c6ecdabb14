"""Synthetic inputs: toy keypoint layouts, polygon line drawings, noisy letters."""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .keypoints import ContourFragment
from .raster import line_pixels
from .scf import Keypoint, KeypointSet, Role

# Stroke font in the unit square (x right, y down); each letter is a list of polylines.
STROKES = {
    "A": [[(0.1, 0.95), (0.5, 0.05), (0.9, 0.95)], [(0.28, 0.6), (0.72, 0.6)]],
    "E": [[(0.8, 0.05), (0.2, 0.05), (0.2, 0.95), (0.8, 0.95)], [(0.2, 0.5), (0.65, 0.5)]],
    "F": [[(0.8, 0.05), (0.2, 0.05), (0.2, 0.95)], [(0.2, 0.5), (0.65, 0.5)]],
    "H": [[(0.2, 0.05), (0.2, 0.95)], [(0.8, 0.05), (0.8, 0.95)], [(0.2, 0.5), (0.8, 0.5)]],
    "K": [[(0.2, 0.05), (0.2, 0.95)], [(0.8, 0.05), (0.2, 0.55)], [(0.38, 0.42), (0.8, 0.95)]],
    "L": [[(0.2, 0.05), (0.2, 0.95), (0.8, 0.95)]],
    "N": [[(0.2, 0.95), (0.2, 0.05), (0.8, 0.95), (0.8, 0.05)]],
    "T": [[(0.1, 0.05), (0.9, 0.05)], [(0.5, 0.05), (0.5, 0.95)]],
    "V": [[(0.1, 0.05), (0.5, 0.95), (0.9, 0.05)]],
    "X": [[(0.15, 0.05), (0.85, 0.95)], [(0.85, 0.05), (0.15, 0.95)]],
    "Z": [[(0.15, 0.05), (0.85, 0.05), (0.15, 0.95), (0.85, 0.95)]],
}


def _segment_distance(px, py, a, b):
    ax, ay = a
    bx, by = b
    vx, vy = bx - ax, by - ay
    t = ((px - ax) * vx + (py - ay) * vy) / max(vx * vx + vy * vy, 1e-12)
    t = np.clip(t, 0.0, 1.0)
    return np.hypot(px - (ax + t * vx), py - (ay + t * vy))


def letter_mask(letter: str, size: int, stroke: float = 0.12, margin: int = 8) -> np.ndarray:
    """Filled boolean (size, size) mask of a thick-stroke capital letter."""
    polylines = STROKES[letter.upper()]
    ys, xs = np.mgrid[0:size, 0:size].astype(float)
    span = size - 2 * margin
    u = (xs - margin) / span
    v = (ys - margin) / span
    dist = np.full((size, size), np.inf)
    for line in polylines:
        for a, b in zip(line, line[1:]):
            dist = np.minimum(dist, _segment_distance(u, v, a, b))
    return dist <= stroke / 2


def boundary_map(region: np.ndarray) -> np.ndarray:
    """One-pixel inner boundary of a filled region (4-neighbour test)."""
    region = np.asarray(region, dtype=bool)
    return region & ~ndimage.binary_erosion(region, structure=ndimage.generate_binary_structure(2, 1),
                                             border_value=0)


def letter_image(letter: str, size: int = 128, background: float = 0.4,
                 foreground: float = 0.6, **kw) -> tuple[np.ndarray, np.ndarray]:
    """Clean low-contrast letter image and its ground-truth boundary map."""
    mask = letter_mask(letter, size, **kw)
    img = np.where(mask, foreground, background).astype(float)
    return img, boundary_map(mask)


def add_noise(img: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """Additive gaussian noise, clamped to [0, 1]."""
    rng = np.random.default_rng(seed)
    return np.clip(img + sigma * rng.standard_normal(img.shape), 0.0, 1.0)


def circle_layout(cx: float, cy: float, radius: float, n_gaps: int = 3,
                  gap_deg: float = 40.0, phase_deg: float = 90.0) -> KeypointSet:
    """Keypoint pairs facing each other across ``n_gaps`` gaps of a circle.

    Each gap contributes two auto keypoints whose orientations are the
    circle's tangents, pointing into the gap. Keypoints come in gap order:
    (leading end, trailing end) per gap.
    """
    kps = []
    for g in range(n_gaps):
        mid = math.radians(phase_deg + 360.0 * g / n_gaps)
        half = math.radians(gap_deg) / 2
        a0, a1 = mid - half, mid + half
        # travelling counter-clockwise (increasing angle) the tangent is (-sin, cos)
        kps.append(Keypoint(cx + radius * math.cos(a0), cy + radius * math.sin(a0),
                            a0 + math.pi / 2, role=Role.AUTO))
        kps.append(Keypoint(cx + radius * math.cos(a1), cy + radius * math.sin(a1),
                            a1 - math.pi / 2, role=Role.AUTO))
    return KeypointSet(kps)


def square_layout(x0: float, y0: float, side: float, gap: float) -> KeypointSet:
    """Keypoint pairs facing each other across a gap centred on every side."""
    x1, y1 = x0 + side, y0 + side
    mx, my = (x0 + x1) / 2, (y0 + y1) / 2
    g = gap / 2
    kps = [
        # top side, gap around (mx, y0)
        Keypoint(mx - g, y0, 0.0), Keypoint(mx + g, y0, math.pi),
        # right side
        Keypoint(x1, my - g, math.pi / 2), Keypoint(x1, my + g, 3 * math.pi / 2),
        # bottom side
        Keypoint(mx + g, y1, math.pi), Keypoint(mx - g, y1, 0.0),
        # left side
        Keypoint(x0, my + g, 3 * math.pi / 2), Keypoint(x0, my - g, math.pi / 2),
    ]
    return KeypointSet(kps)


def random_polygon(rng: np.random.Generator, center: tuple[float, float], radius: float,
                   n_min: int = 3, n_max: int = 6) -> np.ndarray:
    """Convex polygon with jittered vertex angles on a circle; (n, 2) float array."""
    n = int(rng.integers(n_min, n_max + 1))
    spacing = 2 * np.pi / n
    angles = rng.uniform(0, 2 * np.pi) + spacing * (np.arange(n) + rng.uniform(-0.2, 0.2, n))
    r = radius * rng.uniform(0.85, 1.0, n)
    return np.stack([center[0] + r * np.cos(angles), center[1] + r * np.sin(angles)], axis=1)


def _side_parts(vertices: np.ndarray, corner_fraction: float):
    """Per side: (leading corner part, middle part, trailing corner part) pixel lists."""
    pts = np.round(vertices).astype(int)
    n = len(pts)
    parts = []
    for k in range(n):
        (ax, ay), (bx, by) = pts[k], pts[(k + 1) % n]
        pix = line_pixels(int(ax), int(ay), int(bx), int(by))[:-1]  # the next side owns the shared vertex
        m = len(pix)
        lead = [p for i, p in enumerate(pix) if i / m < corner_fraction]
        trail = [p for i, p in enumerate(pix) if i / m >= 1.0 - corner_fraction]
        mid = [p for i, p in enumerate(pix) if corner_fraction <= i / m < 1.0 - corner_fraction]
        parts.append((lead, mid, trail))
    return parts


def polygon_halves(vertices: np.ndarray, shape: tuple[int, int],
                   corner_fraction: float = 0.25) -> tuple[np.ndarray, np.ndarray]:
    """Split a polygon outline into its corner half and its middle half.

    Every side is rasterized and cut by arc-length fraction: the pieces within
    ``corner_fraction`` of either end belong to the corner half, the rest to
    the middle half. The two boolean maps are disjoint.
    """
    corners = np.zeros(shape, dtype=bool)
    middles = np.zeros(shape, dtype=bool)
    for lead, mid, trail in _side_parts(vertices, corner_fraction):
        for x, y in lead + trail:
            corners[y, x] = True
        for x, y in mid:
            middles[y, x] = True
    return corners, middles


def polygon_fragments(vertices: np.ndarray, corner_fraction: float = 0.25
                      ) -> tuple[list[ContourFragment], list[ContourFragment]]:
    """The two halves of ``polygon_halves`` as ordered pixel chains.

    A corner chain runs from the trailing part of one side through the vertex
    into the leading part of the next. Built from the drawing itself rather
    than by tracing, because the arms of an acute corner touch diagonally and
    a tracer must then treat the vertex region as a junction.
    """
    parts = _side_parts(vertices, corner_fraction)
    n = len(parts)
    corners = [ContourFragment(parts[k][2] + parts[(k + 1) % n][0]) for k in range(n)]
    middles = [ContourFragment(mid) for _, mid, _ in parts if mid]
    return corners, middles
