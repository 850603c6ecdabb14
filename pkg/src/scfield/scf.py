"""Source, sink and completion fields built from keypoints.

Conventions
-----------
* A source keypoint's ``theta`` is the heading a walk leaves with.
* An explicit sink keypoint's ``theta`` is the heading a walk arrives with.
* An ``AUTO`` keypoint's ``theta`` points into the gap. When it plays the
  sink role during marginalization, the arrival heading is ``theta + pi``.

The sink field is computed by launching time-reversed walks (heading
``theta + pi``) and flipping the orientation axis of the result, so that
both factors of ``C = U * V`` are indexed by the forward direction of travel.
"""
from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .grid import Field3D, GridSpec, WalkParams
from .propagate import BoundaryMode, iterate, propagate
from .threads import worker_count

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class DegenerateFieldError(RuntimeError):
    """No walk connects the sources to the sinks within the horizon."""


class Role(str, enum.Enum):
    SOURCE = "source"
    SINK = "sink"
    AUTO = "auto"


@dataclass(frozen=True)
class Keypoint:
    x: float
    y: float
    theta: float
    weight: float = 1.0
    role: Role = Role.AUTO

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)
        object.__setattr__(self, "role", Role(self.role))
        if not self.weight > 0:
            raise ValueError(f"keypoint weight must be > 0, got {self.weight}")

    def reversed(self) -> "Keypoint":
        return replace(self, theta=self.theta + math.pi)

    def as_role(self, role: Role) -> "Keypoint":
        return replace(self, role=role)


@dataclass
class KeypointSet:
    keypoints: list[Keypoint] = field(default_factory=list)

    def __post_init__(self):
        self.keypoints = list(self.keypoints)
        roles = {kp.role for kp in self.keypoints}
        if Role.AUTO in roles and len(roles) > 1:
            raise ValueError("cannot mix auto roles with explicit source/sink roles")

    def __iter__(self):
        return iter(self.keypoints)

    def __len__(self):
        return len(self.keypoints)

    def __getitem__(self, i):
        return self.keypoints[i]

    @property
    def is_auto(self) -> bool:
        return bool(self.keypoints) and self.keypoints[0].role is Role.AUTO

    def with_role(self, role: Role) -> list[Keypoint]:
        return [kp for kp in self.keypoints if kp.role is role]


def _as_set(kps) -> KeypointSet:
    return kps if isinstance(kps, KeypointSet) else KeypointSet(kps)


def cell_of(kp: Keypoint, spec: GridSpec) -> tuple[int, int]:
    if not (0 <= kp.x < spec.width_cells and 0 <= kp.y < spec.height_cells):
        raise ValueError(f"keypoint ({kp.x}, {kp.y}) outside grid {spec}")
    xi = min(int(math.floor(kp.x + 0.5)), spec.width_cells - 1)
    yi = min(int(math.floor(kp.y + 0.5)), spec.height_cells - 1)
    return xi, yi


def rasterize(kps, role_filter: Role | Iterable[Role] | None, spec: GridSpec,
              flip_theta: bool = False) -> Field3D:
    """Sum of weighted deltas at the nearest cell and theta bin.

    ``role_filter=None`` selects every keypoint.
    """
    if role_filter is None:
        roles = set(Role)
    elif isinstance(role_filter, Role):
        roles = {role_filter}
    else:
        roles = set(role_filter)
    f = Field3D.zeros(spec)
    n = 0
    for kp in _as_set(kps):
        if kp.role not in roles:
            continue
        xi, yi = cell_of(kp, spec)
        theta = kp.theta + math.pi if flip_theta else kp.theta
        f.values[spec.theta_bin(theta), yi, xi] += kp.weight
        n += 1
    if n == 0:
        raise ValueError("no keypoints match the role filter")
    return f


def source_field(kps, spec: GridSpec, params: WalkParams,
                 b: BoundaryMode = BoundaryMode.ABSORBING, backend="fd") -> Field3D:
    """Time-marginalized source field U = sum_t U(.; t)."""
    return propagate(rasterize(kps, Role.SOURCE, spec), params, b, backend, accumulate=True)


def sink_field(kps, spec: GridSpec, params: WalkParams,
               b: BoundaryMode = BoundaryMode.ABSORBING, backend="fd") -> Field3D:
    """Time-marginalized sink field V, indexed by forward heading."""
    init = rasterize(kps, Role.SINK, spec, flip_theta=True)
    return propagate(init, params, b, backend, accumulate=True).flip_theta()


def _explicit_sources_and_sinks(kps: KeypointSet) -> None:
    if kps.is_auto:
        raise ValueError("completion_field needs explicit roles; use marginalized_field")
    if not kps.with_role(Role.SOURCE) or not kps.with_role(Role.SINK):
        raise ValueError("completion_field needs at least one source and one sink")


def _normalize_peak(values: np.ndarray, what: str) -> np.ndarray:
    peak = values.max()
    if not peak > 0:
        raise DegenerateFieldError(f"{what} is identically zero within the time horizon")
    return values / peak


def completion_field(kps, spec: GridSpec, params: WalkParams,
                     b: BoundaryMode = BoundaryMode.ABSORBING, backend="fd",
                     time_product: bool = False, normalize: bool = True) -> Field3D:
    """Stochastic completion field C = U * V.

    By default the factors are the time-marginalized fields. With
    ``time_product=True`` the product is taken per time slice and then summed
    over t instead. The result is scaled to peak 1 unless ``normalize`` is off.
    """
    kps = _as_set(kps)
    _explicit_sources_and_sinks(kps)
    if time_product:
        u0 = rasterize(kps, Role.SOURCE, spec)
        v0 = rasterize(kps, Role.SINK, spec, flip_theta=True)
        total = np.zeros(spec.shape)
        for u, v in zip(iterate(u0, params, b, backend), iterate(v0, params, b, backend)):
            total += u.values * v.flip_theta().values
        c = total
    else:
        c = (source_field(kps, spec, params, b, backend).values
             * sink_field(kps, spec, params, b, backend).values)
    if normalize:
        c = _normalize_peak(c, "completion field")
    return Field3D(spec, c)


def marginalized_field(kps, spec: GridSpec, params: WalkParams,
                       b: BoundaryMode = BoundaryMode.ABSORBING, backend="fd",
                       exclude: Sequence[tuple[int, int]] = (),
                       normalize: bool = True) -> Field3D:
    """Completion field accumulated over every single-source assignment.

    Iteration i uses keypoint i as the only source and every other keypoint
    as a sink (arrival heading reversed). Each iteration's field is scaled to
    unit mass before accumulation; ``exclude`` lists unordered index pairs
    that must not be paired (e.g. two ends of the same fragment).
    """
    kps = _as_set(kps)
    n = len(kps)
    if n < 2:
        raise ValueError("marginalization needs at least two keypoints")
    if not kps.is_auto:
        raise ValueError("marginalized_field expects keypoints with role auto")
    if spec.theta_cells % 2:
        raise ValueError("marginalization needs an even number of orientation bins")
    banned = {frozenset(p) for p in exclude}

    # By linearity, the sink field of keypoint j (arrival heading theta_j + pi)
    # is its own forward field with the theta axis flipped.
    def forward(kp: Keypoint) -> np.ndarray:
        single = [kp.as_role(Role.SOURCE)]
        return source_field(single, spec, params, b, backend).values

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        fields = list(pool.map(forward, kps.keypoints))
    half = spec.theta_cells // 2
    sinks = [np.roll(u, half, axis=0) for u in fields]

    total = np.zeros(spec.shape)
    for i in range(n):
        v = np.zeros(spec.shape)
        for j in range(n):
            if j != i and frozenset((i, j)) not in banned:
                v += sinks[j]
        c = fields[i] * v
        mass = c.sum()
        if not mass > 0:
            log.info("assignment %d (source at %.1f, %.1f) reaches no sink", i, kps[i].x, kps[i].y)
            continue
        total += c / mass
    if normalize:
        total = _normalize_peak(total, "marginalized completion field")
    return Field3D(spec, total)
