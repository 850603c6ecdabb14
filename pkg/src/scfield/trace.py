"""Most-probable-orientation vector field and greedy path tracing."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .grid import Field3D, GridSpec
from .raster import draw_polyline


@dataclass
class VectorField2D:
    spec: GridSpec
    best_theta: np.ndarray  # (H, W) radians, bin-left angle of the argmax bin
    magnitude: np.ndarray   # (H, W) C at the argmax bin

    @property
    def vectors(self) -> np.ndarray:
        """(H, W, 2) array of magnitude * (cos, sin)."""
        return np.stack([self.magnitude * np.cos(self.best_theta),
                         self.magnitude * np.sin(self.best_theta)], axis=-1)


class Sample(NamedTuple):
    direction: np.ndarray
    magnitude: float


@dataclass
class TracedPath:
    points: list[tuple[float, float]] = field(default_factory=list)
    converged: bool = False
    steps_taken: int = 0
    reason: str = ""

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(-1, 2)


def extract_vector_field(c: Field3D) -> VectorField2D:
    # np.argmax returns the first maximal index, i.e. the lowest bin on ties
    best = np.argmax(c.values, axis=0)
    mag = np.take_along_axis(c.values, best[None], axis=0)[0]
    return VectorField2D(c.spec, best * c.spec.dtheta, mag)


def in_domain(spec: GridSpec, x: float, y: float) -> bool:
    return 0.0 <= x <= spec.width_cells - 1 and 0.0 <= y <= spec.height_cells - 1


def sample_vector(vf: VectorField2D, x: float, y: float,
                  reference: np.ndarray | None = None) -> Sample:
    """Bilinear interpolation of the four surrounding cell vectors.

    With ``reference`` set, each corner vector is first sign-aligned with it
    (theta and theta + pi describe the same tangent line), which keeps
    opposed headings on a symmetric ridge from cancelling.
    A zero interpolated vector comes back as magnitude 0 and direction (0, 0).
    """
    if not in_domain(vf.spec, x, y):
        raise ValueError(f"sample point ({x:.3f}, {y:.3f}) outside the field")
    w, h = vf.spec.width_cells, vf.spec.height_cells
    x0, y0 = min(int(math.floor(x)), w - 2), min(int(math.floor(y)), h - 2)
    fx, fy = x - x0, y - y0
    acc = np.zeros(2)
    for dy, wy in ((0, 1.0 - fy), (1, fy)):
        for dx, wx in ((0, 1.0 - fx), (1, fx)):
            wgt = wx * wy
            if wgt == 0.0:
                continue
            m = vf.magnitude[y0 + dy, x0 + dx]
            t = vf.best_theta[y0 + dy, x0 + dx]
            v = np.array([m * math.cos(t), m * math.sin(t)])
            if reference is not None and v @ reference < 0:
                v = -v
            acc += wgt * v
    mag = float(math.hypot(acc[0], acc[1]))
    if mag == 0.0:
        return Sample(np.zeros(2), 0.0)
    return Sample(acc / mag, mag)


def trace_path(vf: VectorField2D, start, end, step_size: float = 0.5,
               radius: float = 1.5, max_steps: int | None = None,
               align: bool = True) -> TracedPath:
    """Greedy walk from ``start`` along the field until within ``radius`` of ``end``.

    Stops unconverged on ``max_steps``, on leaving the domain, or on a zero
    field vector; ``reason`` records which. With ``align`` on, field vectors
    are sign-aligned with the previous step (the bearing to ``end`` on the
    first step), treating the field as a field of undirected tangents.
    """
    if step_size <= 0 or radius <= 0:
        raise ValueError("step_size and radius must be positive")
    spec = vf.spec
    if max_steps is None:
        max_steps = 8 * (spec.width_cells + spec.height_cells)
    pos = np.asarray(start, dtype=float)
    goal = np.asarray(end, dtype=float)
    start_pt = pos.copy()
    half_gap = 0.5 * float(np.linalg.norm(goal - pos))
    path = TracedPath(points=[(float(pos[0]), float(pos[1]))])
    if np.linalg.norm(goal - pos) <= radius:
        path.converged, path.reason = True, "converged"
        return path

    heading = (goal - pos) / np.linalg.norm(goal - pos)
    for _ in range(max_steps):
        s = sample_vector(vf, pos[0], pos[1], heading if align else None)
        if s.magnitude == 0.0:
            path.reason = "stalled"
            return path
        d = s.direction
        bearing = goal - pos
        if d @ bearing < 0 and np.linalg.norm(pos - start_pt) < half_gap:
            d = -d
        nxt = pos + step_size * d
        if not in_domain(spec, nxt[0], nxt[1]):
            path.reason = "left_domain"
            return path
        pos = nxt
        heading = d
        path.points.append((float(pos[0]), float(pos[1])))
        path.steps_taken += 1
        if np.linalg.norm(goal - pos) <= radius:
            path.converged, path.reason = True, "converged"
            return path
    path.reason = "max_steps"
    return path


def rasterize_path(path: TracedPath, shape: tuple[int, int],
                   end=None) -> np.ndarray:
    """Boolean (H, W) map of the polyline through the rounded path points.

    ``end`` (optional) is appended so a converged path touches its target.
    """
    pts = [(int(math.floor(x + 0.5)), int(math.floor(y + 0.5))) for x, y in path.points]
    if end is not None:
        pts.append((int(math.floor(end[0] + 0.5)), int(math.floor(end[1] + 0.5))))
    out = np.zeros(shape, dtype=bool)
    draw_polyline(out, pts)
    return out
