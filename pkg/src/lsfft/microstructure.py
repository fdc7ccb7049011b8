"""Two-phase indicator fields and their PGM raster format."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .field import Grid2D

KINDS = ("obnosov", "checkerboard", "four_disks")
DISK_CENTERS = ((0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75))


class RasterError(ValueError):
    """Malformed or unsupported PGM raster."""


@dataclass(frozen=True, eq=False)
class Microstructure:
    """Phase map on a grid; ``chi1`` is True in phase 1 (the inclusions)."""

    grid: Grid2D
    chi1: np.ndarray = field(repr=False)

    def __post_init__(self):
        chi = np.asarray(self.chi1, dtype=bool)
        if chi.shape != self.grid.shape:
            raise ValueError(f"indicator of shape {chi.shape} does not match grid {self.grid.shape}")
        chi = chi.copy()
        chi.setflags(write=False)
        object.__setattr__(self, "chi1", chi)

    @classmethod
    def from_mask(cls, mask) -> "Microstructure":
        mask = np.asarray(mask, dtype=bool)
        return cls(Grid2D(*mask.shape), mask)

    @property
    def f1(self) -> float:
        """Exact phase-1 fraction (pixel count ratio)."""
        return int(np.count_nonzero(self.chi1)) / self.grid.size

    @property
    def chi_prime(self) -> np.ndarray:
        """Signed indicator ``2*chi1 - 1`` (+1 in phase 1, -1 in phase 2)."""
        return np.where(self.chi1, 1.0, -1.0)

    def phase_values(self, v1: float, v2: float) -> np.ndarray:
        """Pixel field equal to ``v1`` in phase 1 and ``v2`` in phase 2."""
        return np.where(self.chi1, float(v1), float(v2))


def volume_fraction(m: Microstructure) -> float:
    return m.f1


def generate(kind: str, n: int) -> Microstructure:
    """Build one of the reference microstructures on an ``n x n`` grid.

    obnosov
        Centered square inclusion of side ``n/2`` (phase-1 fraction 1/4).
    checkerboard
        Two diagonal half-cell squares (phase-1 fraction 1/2).
    four_disks
        Four equal disks centered on the quarter points, radius tuned so
        that the pixel-counted fraction is as close to 1/2 as possible.
    """
    kind = kind.replace("-", "_")
    if kind == "obnosov":
        if n < 4 or n % 2:
            raise ValueError(f"obnosov cell needs an even n >= 4, got {n}")
        side = n // 2
        lo = (n - side) // 2
        chi = np.zeros((n, n), dtype=bool)
        chi[lo:lo + side, lo:lo + side] = True
    elif kind == "checkerboard":
        if n < 2 or n % 2:
            raise ValueError(f"checkerboard needs an even n, got {n}")
        lower = np.arange(n) < n // 2
        chi = lower[:, None] == lower[None, :]
    elif kind == "four_disks":
        if n < 8:
            raise ValueError(f"four_disks needs n >= 8, got {n}")
        chi = _four_disks(n, 0.5)
    else:
        raise ValueError(f"unknown microstructure {kind!r}; expected one of {KINDS}")
    return Microstructure(Grid2D(n, n), chi)


def _disks(n: int, radius: float) -> np.ndarray:
    x1, x2 = Grid2D(n, n).pixel_centers()
    chi = np.zeros((n, n), dtype=bool)
    for c1, c2 in DISK_CENTERS:
        chi |= (x1 - c1) ** 2 + (x2 - c2) ** 2 < radius * radius
    return chi


def _four_disks(n: int, target: float) -> np.ndarray:
    # pixel count is monotone in the radius; bisect, then keep the closer side
    lo, hi = 0.0, 0.25
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _disks(n, mid).mean() < target:
            lo = mid
        else:
            hi = mid
    below, above = _disks(n, lo), _disks(n, hi)
    if abs(below.mean() - target) <= abs(above.mean() - target):
        return below
    return above


def save_pgm(m: Microstructure, path) -> None:
    """Write a binary PGM: 255 in phase 1, 0 in phase 2, row ``i`` = index i."""
    n1, n2 = m.grid.shape
    header = f"P5\n{n2} {n1}\n255\n".encode("ascii")
    payload = np.where(m.chi1, 255, 0).astype(np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


def load_pgm(path) -> Microstructure:
    """Read a binary PGM written by :func:`save_pgm` (values >= 128 are phase 1)."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, offset = _pgm_header(data)
    if tokens[0] != b"P5":
        raise RasterError(f"{os.fspath(path)}: not a binary PGM (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise RasterError(f"{os.fspath(path)}: malformed header") from None
    if maxval != 255:
        raise RasterError(f"{os.fspath(path)}: maxval must be 255, got {maxval}")
    if width < 2 or height < 2 or width * height > 1 << 28:
        raise RasterError(f"{os.fspath(path)}: unsupported dimensions {width}x{height}")
    body = data[offset:offset + width * height]
    if len(body) != width * height:
        raise RasterError(f"{os.fspath(path)}: truncated payload")
    img = np.frombuffer(body, dtype=np.uint8).reshape(height, width)
    return Microstructure(Grid2D(height, width), img >= 128)


def _pgm_header(data: bytes):
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise RasterError("malformed header: unexpected end of file")
        tokens.append(data[start:pos])
        if tokens[0] != b"P5":
            return tokens + [b""] * (4 - len(tokens)), pos
    # exactly one whitespace byte separates maxval from the raster
    return tokens, pos + 1


def raster_io(m, path, direction: str = "save"):
    if direction == "save":
        save_pgm(m, path)
        return None
    if direction == "load":
        return load_pgm(path)
    raise ValueError(f"unknown direction {direction!r}")
