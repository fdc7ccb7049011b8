"""Periodic Green's operators for scalar conductivity with isotropic reference.

With an isotropic reference medium the reference modulus cancels and the
operator Gamma1 = Gamma0 L0 acts, frequency by frequency, as the Hermitian
rank-one projector ``conj(xi) (xi . f) / |xi|^2`` onto the direction of the
(possibly complex) effective frequency ``xi``.  The zero frequency is sent to
zero, so Gamma1 maps onto compatible zero-mean fields.

Three choices of ``xi`` are provided:

continuous
    ``xi_j = 2 pi m'_j / l_j``.  On an even axis the Nyquist component is
    taken as ``i * pi n_j / l_j``: it has the same magnitude as the plain
    frequency but keeps ``xi(-m) = -conj(xi(m))``, which is what makes the
    projector map real fields to real fields.
mueller
    ``xi_j = (n_j/l_j) sin(l_j xi_j / n_j)`` (centered differences).
willot
    ``xi_j = i (n_j/l_j) (exp(-i l_j xi_j / n_j) - 1)`` (forward differences).
"""

from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np

from . import field
from .field import Grid2D

# tolerated imaginary residue after the inverse transform, relative to max|f|
IMAG_TOL = 1e-12


class GreenVariant(str, enum.Enum):
    CONTINUOUS = "continuous"
    MUELLER = "mueller"
    WILLOT = "willot"

    @classmethod
    def parse(cls, value) -> "GreenVariant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown Green variant {value!r}; expected one of "
                             f"{[v.value for v in cls]}") from None


class ConsistencyError(RuntimeError):
    """A real field came back from the spectral projector with imaginary content."""


def _axis_frequency(n: int, length: float, variant: GreenVariant) -> np.ndarray:
    m = np.arange(n)
    m_c = np.where(m <= n // 2, m, m - n)
    xi = 2 * np.pi * m_c / length
    h = length / n
    if variant is GreenVariant.CONTINUOUS:
        out = xi.astype(complex)
        if n % 2 == 0:
            out[n // 2] = 1j * np.pi * n / length
        return out
    if variant is GreenVariant.MUELLER:
        out = np.sin(h * xi) / h
        if n % 2 == 0:
            out[n // 2] = 0.0  # sin(pi) round-off
        return out.astype(complex)
    return 1j / h * (np.exp(-1j * h * xi) - 1)


def effective_frequency(grid: Grid2D, index, variant="continuous") -> tuple[complex, complex]:
    """Effective frequency pair at DFT index ``(m, n)``."""
    variant = GreenVariant.parse(variant)
    m, n = index
    if not (0 <= m < grid.n1 and 0 <= n < grid.n2):
        raise IndexError(f"frequency index {index} outside a {grid.n1}x{grid.n2} grid")
    xi1, xi2 = _frequency_axes(grid, variant)
    return complex(xi1[m]), complex(xi2[n])


@lru_cache(maxsize=32)
def _frequency_axes(grid: Grid2D, variant: GreenVariant):
    xi1 = _axis_frequency(grid.n1, grid.l1, variant)
    xi2 = _axis_frequency(grid.n2, grid.l2, variant)
    xi1.setflags(write=False)
    xi2.setflags(write=False)
    return xi1, xi2


@lru_cache(maxsize=32)
def frequency_table(grid: Grid2D, variant: GreenVariant):
    """Per-frequency ``(xi1, xi2, 1/|xi|^2)``; the last entry is 0 where xi = 0."""
    a1, a2 = _frequency_axes(grid, variant)
    xi1 = np.broadcast_to(a1[:, None], grid.shape)
    xi2 = np.broadcast_to(a2[None, :], grid.shape)
    q = (xi1 * xi1.conj() + xi2 * xi2.conj()).real
    inv_q = np.zeros(grid.shape)
    nz = q > 1e-300
    inv_q[nz] = 1.0 / q[nz]
    inv_q.setflags(write=False)
    return xi1, xi2, inv_q


def _real(out: np.ndarray, scale: float) -> np.ndarray:
    im = np.abs(out.imag).max(initial=0.0)
    if im > IMAG_TOL * max(scale, 1e-300) and im > 1e-300:
        raise ConsistencyError(f"imaginary residue {im:.3e} after inverse transform")
    return np.ascontiguousarray(out.real)


def _grid_of(f: np.ndarray, grid: Grid2D | None) -> Grid2D:
    if grid is None:
        return Grid2D(f.shape[-2], f.shape[-1])
    field.check_field(grid, f)
    return grid


def apply_gamma1(f: np.ndarray, variant="continuous", grid: Grid2D | None = None) -> np.ndarray:
    """Project ``f`` onto compatible zero-mean fields."""
    grid = _grid_of(f, grid)
    xi1, xi2, inv_q = frequency_table(grid, GreenVariant.parse(variant))
    fh = field.forward(f)
    s = (xi1 * fh[0] + xi2 * fh[1]) * inv_q
    gh = np.stack((xi1.conj() * s, xi2.conj() * s))
    return _real(field.inverse(gh), np.abs(f).max(initial=0.0))


def apply_h1(f: np.ndarray, variant="continuous", grid: Grid2D | None = None) -> np.ndarray:
    """Shifted operator ``2 Gamma1 - I``."""
    return 2.0 * apply_gamma1(f, variant, grid) - f


def divergence_residual(sigma: np.ndarray, variant="continuous", grid: Grid2D | None = None) -> float:
    """Spectral ``<|div sigma|^2>^(1/2)``, normalized by a unit reference flux."""
    grid = _grid_of(sigma, grid)
    xi1, xi2, _ = frequency_table(grid, GreenVariant.parse(variant))
    sh = field.forward(sigma)
    d = xi1 * sh[0] + xi2 * sh[1]
    d[0, 0] = 0.0
    return float(np.sqrt(np.sum(np.abs(d) ** 2)) / grid.size)
