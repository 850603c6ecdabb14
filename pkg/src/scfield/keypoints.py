"""Contour fragments and keypoints from binary edge maps.

Binary maps are boolean numpy arrays indexed ``[y, x]``. Pixels are linked
with mixed (m-) adjacency: 4-neighbours always, diagonal neighbours only when
no shared 4-neighbour is on. This removes the redundant diagonal links of
one-pixel-wide curves so that an ordinary corner is not mistaken for a
junction. A junction is a pixel with three or more m-neighbours.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scf import Keypoint, KeypointSet, Role

Pixel = tuple[int, int]  # (x, y)

_N4 = ((1, 0), (-1, 0), (0, 1), (0, -1))
_DIAG = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass
class ContourFragment:
    pixels: list[Pixel]
    closed: bool = False

    def __len__(self):
        return len(self.pixels)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.pixels, dtype=float).reshape(-1, 2)


def _m_neighbours(p: Pixel, on: set[Pixel]) -> list[Pixel]:
    x, y = p
    out = [(x + dx, y + dy) for dx, dy in _N4 if (x + dx, y + dy) in on]
    for dx, dy in _DIAG:
        q = (x + dx, y + dy)
        if q in on and (x + dx, y) not in on and (x, y + dy) not in on:
            out.append(q)
    return out


def _raster_key(p: Pixel) -> tuple[int, int]:
    return (p[1], p[0])


def _on_pixels(edges: np.ndarray) -> set[Pixel]:
    ys, xs = np.nonzero(np.asarray(edges, dtype=bool))
    return set(zip(xs.tolist(), ys.tolist()))


def trace_contours(edges: np.ndarray) -> list[ContourFragment]:
    """Split an edge map into simple 8-connected chains.

    Every on pixel lands in exactly one fragment. Junction pixels are
    appended to the first fragment (in raster order) with an end next to
    them; a junction with no such neighbour becomes a one-pixel fragment.
    """
    on = _on_pixels(edges)
    nbrs = {p: _m_neighbours(p, on) for p in on}
    junctions = {p for p, q in nbrs.items() if len(q) >= 3}
    plain = on - junctions
    link = {p: [q for q in nbrs[p] if q in plain] for p in plain}

    frags: list[ContourFragment] = []
    seen: set[Pixel] = set()
    for p in sorted(plain, key=_raster_key):
        if p in seen:
            continue
        comp = [p]
        seen.add(p)
        stack = [p]
        while stack:
            for q in link[stack.pop()]:
                if q not in seen:
                    seen.add(q)
                    comp.append(q)
                    stack.append(q)
        ends = sorted((q for q in comp if len(link[q]) <= 1), key=_raster_key)
        closed = not ends
        start = ends[0] if ends else min(comp, key=_raster_key)
        chain = [start]
        visited = {start}
        cur = start
        while True:
            nxt = sorted((q for q in link[cur] if q not in visited), key=_raster_key)
            if not nxt:
                break
            cur = nxt[0]
            visited.add(cur)
            chain.append(cur)
        frags.append(ContourFragment(chain, closed=closed and len(chain) > 2))

    for j in sorted(junctions, key=_raster_key):
        jn = set(nbrs[j])
        for frag in frags:
            if frag.closed:
                continue
            if frag.pixels[-1] in jn:
                frag.pixels.append(j)
                break
            if frag.pixels[0] in jn:
                frag.pixels.insert(0, j)
                break
        else:
            frags.append(ContourFragment([j]))
    return frags


def _tls_direction(pts: np.ndarray) -> np.ndarray:
    centred = pts - pts.mean(axis=0)
    if not np.any(centred):
        raise ValueError("degenerate tangent fit: all window pixels coincide")
    _, _, vt = np.linalg.svd(centred, full_matrices=False)
    return vt[0]


def end_tangent(pixels: np.ndarray, fit_window: int = 5) -> float:
    """Orientation at ``pixels[-1]`` pointing away from the chain body."""
    k = min(fit_window, len(pixels))
    window = pixels[-k:]
    d = _tls_direction(window)
    # orient along the last step; a hooked window can put the centroid almost
    # beside the end, so the centroid only breaks ties
    s = d @ (window[-1] - window[-2]) if k >= 2 else 0.0
    if abs(s) < 1e-9:
        s = d @ (window[-1] - window.mean(axis=0))
    if s < 0:
        d = -d
    return math.atan2(d[1], d[0]) % (2.0 * math.pi)


def endpoint_keypoints(frag: ContourFragment, fit_window: int = 5) -> list[Keypoint]:
    """Keypoints at the open ends of a fragment, oriented into the gap.

    Returned in chain order: the first pixel's keypoint, then the last's.
    """
    if fit_window < 2:
        raise ValueError("fit_window must be >= 2")
    if frag.closed:
        return []
    if len(frag) < 2:
        raise ValueError("fragment needs at least two pixels for a tangent")
    pts = frag.as_array()
    out = []
    for chain in (pts[::-1], pts):
        x, y = chain[-1]
        out.append(Keypoint(float(x), float(y), end_tangent(chain, fit_window), role=Role.AUTO))
    return out


def fragment_keypoints(frags: list[ContourFragment], fit_window: int = 5,
                       min_length: int = 2) -> tuple[KeypointSet, list[tuple[int, int]]]:
    """Endpoint keypoints of every open fragment of at least ``min_length``.

    Also returns the index pairs of keypoints that sit on the same fragment.
    """
    kps: list[Keypoint] = []
    partners = []
    for frag in frags:
        if frag.closed or len(frag) < max(2, min_length):
            continue
        a, b = endpoint_keypoints(frag, fit_window)
        partners.append((len(kps), len(kps) + 1))
        kps.extend([a, b])
    return KeypointSet(kps), partners


def _touches(mask: np.ndarray, p: Pixel) -> bool:
    h, w = mask.shape
    x, y = p
    return bool(mask[max(y - 1, 0):min(y + 2, h), max(x - 1, 0):min(x + 2, w)].any())


def mask_keypoints(edges: np.ndarray, mask: np.ndarray, fit_window: int = 5) -> KeypointSet:
    """Keypoints where contours enter a masked region, oriented into the mask."""
    edges = np.asarray(edges, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if edges.shape != mask.shape:
        raise ValueError(f"edge map {edges.shape} and mask {mask.shape} differ in size")
    kps = []
    for frag in trace_contours(edges & ~mask):
        if frag.closed or len(frag) < 2:
            continue
        ends = endpoint_keypoints(frag, fit_window)
        for end_px, kp in zip((frag.pixels[0], frag.pixels[-1]), ends):
            if _touches(mask, end_px):
                kps.append(kp)
    return KeypointSet(kps)
