"""One-step Fokker-Planck updates and multi-step propagation.

A step is four sequential passes, each reading the previous pass's finished
output: upwind advection along x, upwind advection along y, the
(lam, 1 - 2 lam, lam) stencil along theta, then multiplication by
exp(-1/tau). Two backends compute the same thing: ``step_fd`` as compiled
stride-1 loops and ``step_conv`` as small per-slice correlation kernels.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator

import numba
import numpy as np
from scipy import ndimage

from .grid import Field3D, GridSpec, StabilityError, WalkParams, trig_tables


class BoundaryMode(enum.Enum):
    ABSORBING = "absorbing"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class StepWeights:
    spec: GridSpec
    lam: float
    decay: float
    cos: np.ndarray
    sin: np.ndarray

    @classmethod
    def from_params(cls, spec: GridSpec, params: WalkParams) -> "StepWeights":
        params.check_stable(spec)
        cos, sin = trig_tables(spec.theta_cells)
        return cls(spec, params.lam(spec), math.exp(-1.0 / params.tau), cos, sin)

    def check(self, spec: GridSpec) -> None:
        if not 0.0 <= self.lam <= 0.5:
            raise StabilityError(f"lambda = {self.lam:.4g} outside [0, 1/2]")
        if spec != self.spec:
            raise ValueError(f"field grid {spec} does not match weights grid {self.spec}")


@numba.njit(cache=True)
def _fd_kernel(p, cos, sin, lam, decay, periodic):
    t_cells, h, w = p.shape
    a = np.empty_like(p)
    b = np.empty_like(p)
    # x-advection: upwind neighbour chosen by the sign of cos
    for t in range(t_cells):
        c = cos[t]
        lo = c if c > 0.0 else 0.0
        up = -c if c < 0.0 else 0.0
        stay = 1.0 - abs(c)
        for y in range(h):
            for x in range(w):
                v = p[t, y, x] * stay
                if x > 0:
                    v += lo * p[t, y, x - 1]
                elif periodic:
                    v += lo * p[t, y, w - 1]
                if x < w - 1:
                    v += up * p[t, y, x + 1]
                elif periodic:
                    v += up * p[t, y, 0]
                a[t, y, x] = v
    # y-advection
    for t in range(t_cells):
        s = sin[t]
        lo = s if s > 0.0 else 0.0
        up = -s if s < 0.0 else 0.0
        stay = 1.0 - abs(s)
        for y in range(h):
            ym = y - 1 if y > 0 else h - 1
            yp = y + 1 if y < h - 1 else 0
            has_lo = y > 0 or periodic
            has_up = y < h - 1 or periodic
            for x in range(w):
                v = a[t, y, x] * stay
                if has_lo:
                    v += lo * a[t, ym, x]
                if has_up:
                    v += up * a[t, yp, x]
                b[t, y, x] = v
    # theta diffusion (always periodic) and decay
    mid = 1.0 - 2.0 * lam
    for t in range(t_cells):
        tm = (t - 1) % t_cells
        tp = (t + 1) % t_cells
        for y in range(h):
            for x in range(w):
                a[t, y, x] = (b[t, y, x] * mid + lam * b[tm, y, x] + lam * b[tp, y, x]) * decay
    return a


def step_fd(p_in: Field3D, w: StepWeights,
            b: BoundaryMode = BoundaryMode.ABSORBING) -> Field3D:
    w.check(p_in.spec)
    src = np.ascontiguousarray(p_in.values, dtype=np.float64)
    out = _fd_kernel(src, w.cos, w.sin, w.lam, w.decay, b is BoundaryMode.PERIODIC)
    return Field3D(p_in.spec, out)


def spatial_kernels(v: float) -> np.ndarray:
    """3-tap correlation kernel (lower, centre, upper) for velocity ``v``.

    Only two taps are ever non-zero; which side depends on the sign of v.
    """
    if v >= 0:
        return np.array([v, 1.0 - v, 0.0])
    return np.array([0.0, 1.0 + v, -v])


def theta_kernel(lam: float) -> np.ndarray:
    return np.array([lam, 1.0 - 2.0 * lam, lam])


def step_conv(p_in: Field3D, w: StepWeights,
              b: BoundaryMode = BoundaryMode.ABSORBING) -> Field3D:
    w.check(p_in.spec)
    mode = "wrap" if b is BoundaryMode.PERIODIC else "constant"
    src = p_in.values
    out = np.empty_like(src)
    for ti in range(src.shape[0]):
        s = ndimage.correlate1d(src[ti], spatial_kernels(w.cos[ti]), axis=1,
                                mode=mode, cval=0.0)
        out[ti] = ndimage.correlate1d(s, spatial_kernels(w.sin[ti]), axis=0,
                                      mode=mode, cval=0.0)
    out = ndimage.correlate1d(out, theta_kernel(w.lam), axis=0, mode="wrap")
    out *= w.decay
    return Field3D(p_in.spec, out)


BACKENDS = {"fd": step_fd, "conv": step_conv}


def _stepper(backend):
    if callable(backend):
        return backend
    try:
        return BACKENDS[backend]
    except KeyError:
        raise ValueError(f"unknown backend {backend!r}; choose from {sorted(BACKENDS)}")


def iterate(p_init: Field3D, params: WalkParams,
            b: BoundaryMode = BoundaryMode.ABSORBING,
            backend="fd") -> Iterator[Field3D]:
    """Yield the snapshots for t = 0 .. t_max, starting with ``p_init`` itself."""
    step = _stepper(backend)
    w = StepWeights.from_params(p_init.spec, params)
    if np.any(p_init.values < 0):
        raise ValueError("initial density has negative entries")
    p = p_init
    yield p
    for _ in range(params.t_max):
        p = step(p, w, b)
        yield p


def propagate(p_init: Field3D, params: WalkParams,
              b: BoundaryMode = BoundaryMode.ABSORBING, backend="fd",
              accumulate: bool = False):
    """Run ``t_max`` steps.

    Returns the list of snapshots, or with ``accumulate=True`` the running
    time-sum of all of them (constant memory).
    """
    if not accumulate:
        return list(iterate(p_init, params, b, backend))
    total = np.zeros(p_init.spec.shape)
    for snap in iterate(p_init, params, b, backend):
        total += snap.values
    return Field3D(p_init.spec, total)
