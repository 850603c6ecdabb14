"""Monte Carlo estimates of source, sink and completion fields.

Walkers follow the continuous drift-diffusion walk: each unit step moves the
position by (cos theta, sin theta), perturbs theta by N(0, sigma^2), and the
walker survives with probability exp(-1/tau). States are binned to the same
cells as the finite-difference solver (nearest cell, nearest theta bin), so
histograms compare directly with propagated fields.

Walkers are processed in fixed-size chunks; chunk k draws from
``default_rng([seed, k])``. Results depend only on the seed, never on how
many threads run the chunks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import Field3D, GridSpec, WalkParams
from .propagate import BoundaryMode
from .scf import DegenerateFieldError, Keypoint, Role, _as_set, cell_of
from .threads import worker_count

CHUNK = 1 << 16


@dataclass(frozen=True)
class WalkerConfig:
    n_walkers: int
    rng_seed: int
    params: WalkParams
    sink_radius: float = 0.5
    sink_theta_window: float | None = None  # radians; None means 2 * dtheta

    def __post_init__(self):
        if self.n_walkers < 1:
            raise ValueError("n_walkers must be >= 1")
        if not self.sink_radius > 0:
            raise ValueError("sink_radius must be > 0")

    def theta_window(self, spec: GridSpec) -> float:
        if self.sink_theta_window is None:
            return 2.0 * spec.dtheta
        return self.sink_theta_window


@dataclass
class WalkResult:
    histogram: Field3D
    alive: np.ndarray   # walkers alive (and not yet absorbed) at each step
    accepted: int       # walkers absorbed by a sink; 0 when there are no sinks


def _start_states(kps: list[Keypoint], spec: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    starts = []
    for kp in kps:
        xi, yi = cell_of(kp, spec)
        starts.append((xi, yi, spec.theta_bin(kp.theta) * spec.dtheta))
    weights = np.array([kp.weight for kp in kps], dtype=float)
    return np.array(starts, dtype=float), weights


def _cells(spec: GridSpec, x, y, th):
    xi = np.floor(x + 0.5).astype(np.int64)
    yi = np.floor(y + 0.5).astype(np.int64)
    ti = np.floor(th / spec.dtheta + 0.5).astype(np.int64) % spec.theta_cells
    return xi, yi, ti


def _chunk(k: int, n: int, starts, weights, sinks, spec: GridSpec, cfg: WalkerConfig,
           b: BoundaryMode):
    rng = np.random.default_rng([cfg.rng_seed, k])
    p = cfg.params
    t_max = p.t_max
    w, h = spec.width_cells, spec.height_cells
    pick = rng.choice(len(starts), size=n, p=weights / weights.sum())
    x, y, th = (starts[pick, i].copy() for i in range(3))
    alive = np.ones(n, dtype=bool)
    survive = math.exp(-1.0 / p.tau)
    track = sinks is not None
    traj = np.full((t_max + 1, n), -1, dtype=np.int64) if track else None
    accepted = np.zeros(n, dtype=bool)
    counts = np.zeros(spec.size, dtype=np.int64)
    alive_per_step = np.zeros(t_max + 1, dtype=np.int64)
    r2 = cfg.sink_radius ** 2
    window = cfg.theta_window(spec)

    for t in range(t_max + 1):
        xi, yi, ti = _cells(spec, x, y, th)
        flat = xi + w * (yi + h * ti)
        alive_per_step[t] = alive.sum()
        if track:
            traj[t, alive] = flat[alive]
            hit = np.zeros(n, dtype=bool)
            for sx, sy, st in sinks:
                dth = np.abs((th - st + math.pi) % (2.0 * math.pi) - math.pi)
                hit |= ((x - sx) ** 2 + (y - sy) ** 2 <= r2) & (dth <= window)
            hit &= alive
            accepted |= hit
            alive &= ~hit
        else:
            counts += np.bincount(flat[alive], minlength=spec.size)
        if t == t_max:
            break
        x = x + np.cos(th)
        y = y + np.sin(th)
        th = th + p.sigma * rng.standard_normal(n)
        alive &= rng.random(n) < survive
        if b is BoundaryMode.PERIODIC:
            x = (x + 0.5) % w - 0.5
            y = (y + 0.5) % h - 0.5
        else:
            alive &= (x >= -0.5) & (x < w - 0.5) & (y >= -0.5) & (y < h - 0.5)

    if track:
        sel = traj[:, accepted]
        counts = np.bincount(sel[sel >= 0], minlength=spec.size)
    return counts, alive_per_step, int(accepted.sum())


def simulate(kps, spec: GridSpec, cfg: WalkerConfig,
             b: BoundaryMode = BoundaryMode.ABSORBING,
             sinks: list[Keypoint] | None = None) -> WalkResult:
    """Run walkers from the source keypoints of ``kps``.

    Without ``sinks`` every visited state is counted. With ``sinks`` only
    walkers that come within ``sink_radius`` of a sink, heading within the
    theta window of the sink's arrival heading, are counted, up to and
    including the step at which they arrive.
    """
    sources = [kp for kp in _as_set(kps) if kp.role is Role.SOURCE]
    if not sources:
        raise ValueError("simulation needs at least one source keypoint")
    cfg.params.check_stable(spec)
    starts, weights = _start_states(sources, spec)
    sink_states = None
    if sinks is not None:
        sink_states = [tuple(s) for s in _start_states(sinks, spec)[0]]
    sizes = [CHUNK] * (cfg.n_walkers // CHUNK)
    if cfg.n_walkers % CHUNK:
        sizes.append(cfg.n_walkers % CHUNK)

    def run(args):
        k, n = args
        return _chunk(k, n, starts, weights, sink_states, spec, cfg, b)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        parts = list(pool.map(run, enumerate(sizes)))
    counts = np.zeros(spec.size, dtype=np.int64)
    alive = np.zeros(cfg.params.t_max + 1, dtype=np.int64)
    accepted = 0
    for c, a, acc in parts:
        counts += c
        alive += a
        accepted += acc
    hist = counts.reshape(spec.shape) * (weights.sum() / cfg.n_walkers)
    return WalkResult(Field3D(spec, hist), alive, accepted)


def simulate_source_histogram(kps, spec: GridSpec, cfg: WalkerConfig,
                              b: BoundaryMode = BoundaryMode.ABSORBING) -> Field3D:
    """Expected visits per state of walks launched from the sources."""
    return simulate(kps, spec, cfg, b).histogram


def simulate_sink_histogram(kps, spec: GridSpec, cfg: WalkerConfig,
                            b: BoundaryMode = BoundaryMode.ABSORBING) -> Field3D:
    """Sink-field estimate: walkers run backward from the sinks, theta axis flipped back."""
    sinks = [kp for kp in _as_set(kps) if kp.role is Role.SINK]
    if not sinks:
        raise ValueError("simulation needs at least one sink keypoint")
    backward = [Keypoint(kp.x, kp.y, kp.theta + math.pi, kp.weight, Role.SOURCE) for kp in sinks]
    return simulate(backward, spec, cfg, b).histogram.flip_theta()


def simulate_completion_histogram(kps, spec: GridSpec, cfg: WalkerConfig,
                                  b: BoundaryMode = BoundaryMode.ABSORBING) -> Field3D:
    """Visit histogram of source walks that end at a sink (no factorization)."""
    kps = _as_set(kps)
    sinks = kps.with_role(Role.SINK)
    if not kps.with_role(Role.SOURCE) or not sinks:
        raise ValueError("completion simulation needs explicit sources and sinks")
    res = simulate(kps, spec, cfg, b, sinks=sinks)
    if res.accepted == 0:
        raise DegenerateFieldError(
            f"none of {cfg.n_walkers} walkers reached a sink; raise n_walkers or shrink the gap")
    return res.histogram
