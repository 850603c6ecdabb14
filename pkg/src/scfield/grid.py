"""Discrete (x, y, theta) state space and the dense density container.

Arrays are stored with shape ``(theta_cells, height_cells, width_cells)`` so
that C order is x-fastest, then y, then theta. One cell is one pixel
(``dx = dy = 1``); cell centres sit at integer coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class StabilityError(ValueError):
    """Raised when the theta-diffusion stencil would have a negative weight."""


@dataclass(frozen=True)
class GridSpec:
    width_cells: int
    height_cells: int
    theta_cells: int

    def __post_init__(self):
        if self.width_cells < 2 or self.height_cells < 2:
            raise ValueError("grid needs at least 2 cells along x and y")
        if self.theta_cells < 4:
            raise ValueError("grid needs at least 4 orientation bins")

    @property
    def dx(self) -> float:
        return 1.0

    @property
    def dy(self) -> float:
        return 1.0

    @property
    def dtheta(self) -> float:
        return 2.0 * math.pi / self.theta_cells

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.theta_cells, self.height_cells, self.width_cells)

    @property
    def size(self) -> int:
        return self.width_cells * self.height_cells * self.theta_cells

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width_cells, self.height_cells)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"WxHxT"``."""
        parts = text.lower().split("x")
        if len(parts) != 3:
            raise ValueError(f"grid must look like WxHxT, got {text!r}")
        return cls(*(int(p) for p in parts))

    def angles(self) -> np.ndarray:
        """Bin-left angle of every theta index (index 0 is exactly +x)."""
        return np.arange(self.theta_cells) * self.dtheta

    def theta_bin(self, theta: float) -> int:
        """Nearest theta bin of an angle in radians."""
        return int(math.floor(theta / self.dtheta + 0.5)) % self.theta_cells

    def contains(self, xi: int, yi: int) -> bool:
        return 0 <= xi < self.width_cells and 0 <= yi < self.height_cells


def trig_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of ``2*pi*k/n`` for k in [0, n).

    Values are folded onto the first octant so the tables respect the
    dihedral symmetries of the bin lattice bit-exactly: cos(-a) = cos(a),
    cos(pi - a) = -cos(a) for even n, and a quarter turn permutes
    (cos, sin) -> (-sin, cos) when n is a multiple of 4.
    """
    cos = np.empty(n)
    sin = np.empty(n)
    step = 2.0 * math.pi / n
    half_root = math.sqrt(0.5)
    for k in range(n):
        j = k
        sgn_c = sgn_s = 1.0
        if 2 * j > n:
            j = n - j
            sgn_s = -1.0
        if n % 2 == 0 and 4 * j > n:
            j = n // 2 - j
            sgn_c = -1.0
        if n % 4 == 0 and 8 * j == n:
            c = s = half_root
        elif n % 4 == 0 and 8 * j > n:
            m = n // 4 - j
            c, s = math.sin(m * step), math.cos(m * step)
        else:
            c, s = math.cos(j * step), math.sin(j * step)
        cos[k] = sgn_c * c
        sin[k] = sgn_s * s
    return cos, sin


@dataclass(frozen=True)
class WalkParams:
    """Random-walk prior: orientation diffusion, decay constant and horizon."""

    sigma: float
    tau: float
    t_max: int

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if not self.tau > 0:
            raise ValueError("tau must be > 0")
        if self.t_max < 0:
            raise ValueError("t_max must be >= 0")

    @classmethod
    def default(cls, spec: GridSpec, sigma: float | None = None,
                tau: float | None = None, t_max: int | None = None) -> "WalkParams":
        if sigma is None:
            sigma = 0.7 * spec.dtheta
        if tau is None:
            tau = 0.5 * spec.diagonal
        if t_max is None:
            t_max = 2 * (spec.width_cells + spec.height_cells)
        return cls(sigma, tau, t_max)

    def lam(self, spec: GridSpec) -> float:
        return self.sigma ** 2 / (2.0 * spec.dtheta ** 2)

    def check_stable(self, spec: GridSpec) -> None:
        lam = self.lam(spec)
        if lam > 0.5:
            raise StabilityError(
                f"lambda = sigma^2/(2 dtheta^2) = {lam:.4g} exceeds 1/2 "
                f"(sigma={self.sigma:.4g}, dtheta={spec.dtheta:.4g})")


@dataclass
class Field3D:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.spec.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {self.spec.shape}")

    @classmethod
    def zeros(cls, spec: GridSpec) -> "Field3D":
        return cls(spec, np.zeros(spec.shape))

    def copy(self) -> "Field3D":
        return Field3D(self.spec, self.values.copy())

    def flat(self) -> np.ndarray:
        """Values in dump order (x-fastest, then y, then theta)."""
        return self.values.reshape(-1)

    def max_over_theta(self) -> np.ndarray:
        return self.values.max(axis=0)

    def flip_theta(self) -> "Field3D":
        """Relabel orientation theta -> theta + pi (requires an even bin count)."""
        if self.spec.theta_cells % 2:
            raise ValueError("theta flip needs an even number of orientation bins")
        return Field3D(self.spec, np.roll(self.values, self.spec.theta_cells // 2, axis=0))

    def __add__(self, other: "Field3D") -> "Field3D":
        _check_same(self, other)
        return Field3D(self.spec, self.values + other.values)

    def __mul__(self, other):
        if isinstance(other, Field3D):
            _check_same(self, other)
            return Field3D(self.spec, self.values * other.values)
        return Field3D(self.spec, self.values * float(other))

    __rmul__ = __mul__


def _check_same(a: Field3D, b: Field3D) -> None:
    if a.spec != b.spec:
        raise ValueError(f"grid mismatch: {a.spec} vs {b.spec}")


def state_index(spec: GridSpec, xi: int, yi: int, ti: int) -> int:
    if not spec.contains(xi, yi):
        raise IndexError(f"spatial index ({xi}, {yi}) outside {spec}")
    ti %= spec.theta_cells
    return xi + spec.width_cells * (yi + spec.height_cells * ti)


def state_coords(spec: GridSpec, index: int) -> tuple[int, int, int]:
    if not 0 <= index < spec.size:
        raise IndexError(f"flat index {index} outside {spec}")
    index, xi = divmod(index, spec.width_cells)
    ti, yi = divmod(index, spec.height_cells)
    return xi, yi, ti


def total_mass(f: Field3D) -> float:
    return float(f.values.sum())


def delta_field(spec: GridSpec, xi: int, yi: int, ti: int, weight: float = 1.0) -> Field3D:
    f = Field3D.zeros(spec)
    f.values[ti % spec.theta_cells, yi, xi] = weight
    return f
