"""Integer line and circle rasterization on boolean (H, W) maps."""
from __future__ import annotations

import numpy as np


def line_pixels(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Bresenham line from (x0, y0) to (x1, y1), both ends included."""
    pts = []
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        pts.append((x, y))
        if x == x1 and y == y1:
            return pts
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def _plot(img: np.ndarray, pts) -> None:
    h, w = img.shape
    for x, y in pts:
        if 0 <= x < w and 0 <= y < h:
            img[y, x] = True


def draw_line(img: np.ndarray, p0, p1) -> None:
    _plot(img, line_pixels(int(p0[0]), int(p0[1]), int(p1[0]), int(p1[1])))


def draw_polyline(img: np.ndarray, pts) -> None:
    pts = list(pts)
    if len(pts) == 1:
        _plot(img, pts)
    for a, b in zip(pts, pts[1:]):
        draw_line(img, a, b)


def circle_pixels(cx: int, cy: int, r: int) -> list[tuple[int, int]]:
    """Midpoint circle, ordered counter-clockwise in image coordinates
    (angle measured from +x towards +y), starting at angle 0."""
    octant = []
    x, y, err = r, 0, 1 - r
    while x >= y:
        octant.append((x, y))
        y += 1
        if err < 0:
            err += 2 * y + 1
        else:
            x -= 1
            err += 2 * (y - x) + 1
    # first quadrant (0 .. 90 deg) from the octant and its mirror
    quad = octant + [(y, x) for x, y in reversed(octant)]
    quadrant = []
    for p in quad:
        if not quadrant or quadrant[-1] != p:
            quadrant.append(p)
    ring = []
    for rx, ry in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
        seq = quadrant if rx * ry > 0 else quadrant[::-1]
        ring.extend((x * rx, y * ry) for x, y in seq)
    out = []
    for x, y in ring:
        p = (cx + x, cy + y)
        if not out or out[-1] != p:
            out.append(p)
    if out[-1] == out[0]:
        out.pop()
    return out


def draw_circle(img: np.ndarray, cx: int, cy: int, r: int) -> None:
    _plot(img, circle_pixels(cx, cy, r))
