"""File formats: PGM (P5) images, binary field dumps, keypoint and path text files.

Field dump layout: ``b"SCF1"``, then width, height and theta cell counts as
little-endian uint32, then the values as little-endian float32 in x-fastest
order (the in-memory (theta, y, x) C order).
"""
from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .grid import Field3D, GridSpec
from .scf import Keypoint, KeypointSet, Role
from .trace import TracedPath

MAGIC = b"SCF1"
_HEADER = struct.Struct("<4s3I")


class FormatError(ValueError):
    """Malformed input file."""


# -- PGM --------------------------------------------------------------------

def _pgm_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    """Read ``count`` header integers after the magic; returns them and the offset
    of the single whitespace byte that ends the header."""
    vals = []
    i = 2
    n = len(data)
    while len(vals) < count:
        if i >= n:
            raise FormatError("truncated PGM header")
        c = data[i:i + 1]
        if c == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < n and data[j:j + 1].isdigit():
                j += 1
            vals.append(int(data[i:j]))
            i = j
        else:
            raise FormatError(f"unexpected byte {c!r} in PGM header")
    if i >= n or not data[i:i + 1].isspace():
        raise FormatError("PGM header must end with one whitespace byte")
    return vals, i


def read_pgm(path) -> np.ndarray:
    """Binary PGM with maxval 255 as a uint8 array indexed [y, x]."""
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (P5)")
    (w, h, maxval), end = _pgm_tokens(data, 3)
    if maxval != 255:
        raise FormatError(f"{path}: maxval {maxval} unsupported (only 255)")
    if w < 1 or h < 1:
        raise FormatError(f"{path}: bad dimensions {w}x{h}")
    body = data[end + 1:]
    if len(body) != w * h:
        raise FormatError(f"{path}: expected {w * h} pixel bytes, found {len(body)}")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w).copy()


def write_pgm(path, img: np.ndarray) -> None:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError("PGM images are 2-D")
    if img.dtype != np.uint8:
        raise ValueError("write_pgm expects uint8 pixels; use to_gray8 first")
    h, w = img.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(img).tobytes())


def to_gray8(img: np.ndarray) -> np.ndarray:
    """[0, 1] floats to bytes, rounding to nearest."""
    return np.floor(np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def read_gray(path) -> np.ndarray:
    return read_pgm(path).astype(float) / 255.0


def read_binary(path) -> np.ndarray:
    """PGM as a binary map: a pixel is on when its value is >= 128."""
    return read_pgm(path) >= 128


def write_binary(path, bits: np.ndarray) -> None:
    write_pgm(path, np.where(np.asarray(bits, dtype=bool), 255, 0).astype(np.uint8))


def render_field(field: Field3D) -> np.ndarray:
    """Max over theta, peak-normalized, dark where probability is high."""
    m = field.max_over_theta()
    peak = m.max()
    if peak <= 0:
        return np.full(m.shape, 255, dtype=np.uint8)
    return to_gray8(1.0 - m / peak)


# -- field dumps ------------------------------------------------------------

def dump_bytes(field: Field3D) -> bytes:
    s = field.spec
    head = _HEADER.pack(MAGIC, s.width_cells, s.height_cells, s.theta_cells)
    return head + np.ascontiguousarray(field.values, dtype="<f4").tobytes()


def load_bytes(data: bytes) -> Field3D:
    if len(data) < _HEADER.size:
        raise FormatError("field dump shorter than its header")
    magic, w, h, t = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad field dump magic {magic!r}")
    spec = GridSpec(w, h, t)
    payload = data[_HEADER.size:]
    if len(payload) != 4 * spec.size:
        raise FormatError(f"field dump payload is {len(payload)} bytes, expected {4 * spec.size}")
    vals = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(spec.shape)
    return Field3D(spec, vals)


def save_field(path, field: Field3D) -> None:
    Path(path).write_bytes(dump_bytes(field))


def load_field(path) -> Field3D:
    return load_bytes(Path(path).read_bytes())


# -- keypoints --------------------------------------------------------------

def parse_keypoints(text: str) -> KeypointSet:
    """``x y theta_deg role [weight]`` per line; ``#`` starts a comment."""
    kps = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (4, 5):
            raise FormatError(f"line {n}: expected 'x y theta_deg role [weight]', got {line!r}")
        try:
            x, y, deg = (float(v) for v in parts[:3])
            weight = float(parts[4]) if len(parts) == 5 else 1.0
            role = Role(parts[3].lower())
            kps.append(Keypoint(x, y, math.radians(deg), weight, role))
        except ValueError as e:
            raise FormatError(f"line {n}: {e}") from None
    try:
        return KeypointSet(kps)
    except ValueError as e:
        raise FormatError(str(e)) from None


def format_keypoints(kps) -> str:
    lines = ["# x y theta_deg role weight"]
    for kp in kps:
        lines.append(f"{kp.x:.6g} {kp.y:.6g} {math.degrees(kp.theta):.6g} {kp.role.value} {kp.weight:.6g}")
    return "\n".join(lines) + "\n"


def read_keypoints(path) -> KeypointSet:
    return parse_keypoints(Path(path).read_text())


def write_keypoints(path, kps) -> None:
    Path(path).write_text(format_keypoints(kps))


# -- paths ------------------------------------------------------------------

def format_path(path: TracedPath) -> str:
    return "".join(f"{x:.9g} {y:.9g}\n" for x, y in path.points)


def write_path(out, path: TracedPath) -> None:
    Path(out).write_text(format_path(path))


def read_path(path) -> np.ndarray:
    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    return np.array([[float(a), float(b)] for a, b in rows], dtype=float).reshape(-1, 2)
