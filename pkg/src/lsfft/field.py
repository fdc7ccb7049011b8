"""Periodic pixel grids and two-component real fields.

Fields are plain ``numpy`` arrays of shape ``(2, n1, n2)``: the leading axis
holds the components along e1 and e2, the trailing axes index pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid2D:
    """Periodic unit cell discretized into ``n1 x n2`` pixels."""

    n1: int
    n2: int
    l1: float = 1.0
    l2: float = 1.0

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError(f"grid needs at least 2 pixels per axis, got {self.n1}x{self.n2}")
        if not (self.l1 > 0 and self.l2 > 0):
            raise ValueError("cell lengths must be positive")

    @classmethod
    def square(cls, n: int) -> "Grid2D":
        return cls(n, n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def size(self) -> int:
        return self.n1 * self.n2

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of pixel centers, each of shape ``(n1, n2)``."""
        x1 = (np.arange(self.n1) + 0.5) * self.l1 / self.n1
        x2 = (np.arange(self.n2) + 0.5) * self.l2 / self.n2
        return np.meshgrid(x1, x2, indexing="ij")

    def centered_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Centered integer representatives m' of the frequency indices.

        The Nyquist index of an even axis is kept as ``+n/2``.
        """
        return _centered(self.n1), _centered(self.n2)

    def angular_frequencies(self) -> tuple[np.ndarray, np.ndarray]:
        """Angular frequencies ``2*pi*m'/l`` along each axis (1-D arrays)."""
        m1, m2 = self.centered_indices()
        return 2 * np.pi * m1 / self.l1, 2 * np.pi * m2 / self.l2


def _centered(n: int) -> np.ndarray:
    m = np.arange(n)
    return np.where(m <= n // 2, m, m - n)


def zeros(grid: Grid2D) -> np.ndarray:
    return np.zeros((2,) + grid.shape)


def constant(grid: Grid2D, value) -> np.ndarray:
    """Uniform field equal to ``value`` (a pair) at every pixel."""
    v = np.asarray(value, dtype=float).reshape(2, 1, 1)
    return np.broadcast_to(v, (2,) + grid.shape).copy()


def check_field(grid: Grid2D, f: np.ndarray) -> None:
    if f.shape != (2,) + grid.shape:
        raise ValueError(f"field of shape {f.shape} does not live on a {grid.n1}x{grid.n2} grid")


def forward(f: np.ndarray) -> np.ndarray:
    """Unnormalized DFT over the pixel axes."""
    return np.fft.fft2(f, axes=(-2, -1))


def inverse(fh: np.ndarray) -> np.ndarray:
    """Inverse of :func:`forward` (divides by ``n1*n2``); complex output."""
    return np.fft.ifft2(fh, axes=(-2, -1))


def spectral_transform(grid: Grid2D, f: np.ndarray, direction: str = "forward") -> np.ndarray:
    """Forward or inverse transform of a field on ``grid``.

    ``inverse`` returns the real part; callers that need to check the
    imaginary residue should use :func:`inverse` directly.
    """
    check_field(grid, f)
    if direction == "forward":
        return forward(f)
    if direction == "inverse":
        return inverse(f).real
    raise ValueError(f"unknown direction {direction!r}")


def mean(f: np.ndarray) -> np.ndarray:
    """Componentwise average over all pixels."""
    return f.mean(axis=(-2, -1))


def l2_norm(f: np.ndarray) -> float:
    """Root of the mean square pointwise magnitude, ``<|f|^2>^(1/2)``."""
    return float(np.sqrt(np.mean(np.sum(f * f, axis=0))))


def inner(f: np.ndarray, g: np.ndarray) -> float:
    """Mean pointwise dot product ``<f . g>``."""
    return float(np.mean(np.sum(f * g, axis=0)))
