"""Theoretical convergence rates of the three schemes.

If the singularities of the effective conductivity lie in ``[-beta, -1/beta]``
then each scheme's series in ``t`` has a radius ``rho`` fixed by ``beta``, and
the asymptotic rate is ``r = rho / |t|`` (larger is faster, ``r > 1``
converges).  ``beta = inf`` (checkerboard) is handled through the limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf
LABELS = ("B", "MS", "EM")
TIE, UNDEF = "TIE", "UNDEF"
MS_DOMINANT = "MS-dominant"


@dataclass(frozen=True)
class SingularityModel:
    """Singularities of the effective conductivity confined to [-beta, -1/beta]."""

    beta: float

    def __post_init__(self):
        _check_beta(self.beta)

    @classmethod
    def obnosov(cls) -> "SingularityModel":
        return cls(3.0)

    @classmethod
    def checkerboard(cls) -> "SingularityModel":
        return cls(INF)


@dataclass(frozen=True)
class RateTriple:
    r_b: float
    r_ms: float
    r_em: float  # nan where undefined (z < 0)

    def as_tuple(self) -> tuple[float, float, float]:
        return self.r_b, self.r_ms, self.r_em


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not beta >= 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    return beta


def radii(beta: float) -> tuple[float, float, float]:
    """Radii of convergence ``(rho_B, rho_MS, rho_EM)`` of the three series."""
    beta = _check_beta(beta)
    if math.isinf(beta):
        return 1.0, 1.0, 1.0
    rho_ms = INF if beta == 1 else (beta + 1) / (beta - 1)
    return 1 + 1 / beta, rho_ms, 1.0


def _ratio(rho: float, t: float) -> float:
    if t == 0:
        return INF
    return rho / abs(t)


def rates(beta: float, z: float) -> RateTriple:
    """Rates ``rho / |t|`` of B, MS and EM at real contrast ``z``."""
    rho_b, rho_ms, rho_em = radii(beta)
    z = float(z)
    if math.isinf(z):
        return RateTriple(0.0, rho_ms, rho_em)
    r_b = _ratio(rho_b, z - 1)
    r_ms = INF if z == -1 else _ratio(rho_ms, (z - 1) / (z + 1))
    if z < 0:
        r_em = math.nan
    else:
        s = math.sqrt(z)
        r_em = _ratio(rho_em, (s - 1) / (s + 1))
    return RateTriple(r_b, r_ms, r_em)


def regime_thresholds(beta: float):
    """Contrasts ``(z0, z1, z2)`` where the schemes' rates cross.

    B beats EM for ``z < z0``; for ``beta >= 3`` EM beats MS on ``(z1, z2)``.
    Below ``beta = 3`` MS beats EM at every contrast and ``z1``, ``z2`` are
    replaced by the :data:`MS_DOMINANT` sentinel.
    """
    beta = _check_beta(beta)
    if math.isinf(beta):
        return 0.0, 0.0, INF
    z0 = (math.sqrt((beta + 1) / beta) - 1) ** 2
    if beta < 3:
        return z0, MS_DOMINANT, MS_DOMINANT
    root = math.sqrt(max((beta - 1) ** 2 - 4, 0.0))
    z2 = 0.25 * (beta - 1 + root) ** 2
    # (beta - 1 - root) = 4 / (beta - 1 + root), free of cancellation
    z1 = 4.0 / (beta - 1 + root) ** 2
    return z0, z1, z2


def winner(triple: RateTriple, rtol: float = 1e-12) -> str:
    """Label of the fastest scheme, TIE for shared maxima, UNDEF if none is defined."""
    values = np.array(triple.as_tuple())
    defined = ~np.isnan(values)
    if not defined.any():
        return UNDEF
    best = values[defined].max()
    if math.isinf(best):
        top = [lab for lab, v in zip(LABELS, values) if v == INF]
    else:
        top = [lab for lab, v in zip(LABELS, values)
               if not math.isnan(v) and abs(v - best) <= rtol * best]
    return top[0] if len(top) == 1 else TIE


def best_scheme_grid(beta_axis, z_axis):
    """Per-cell winner labels and rates on the ``beta x z`` grid.

    Returns ``(labels, r)`` with ``labels`` a string array of shape
    ``(len(beta_axis), len(z_axis))`` and ``r`` the rates, shape ``(3, ...)``.
    """
    beta_axis = np.asarray(beta_axis, dtype=float)
    z_axis = np.asarray(z_axis, dtype=float)
    for name, ax in (("beta", beta_axis), ("z", z_axis)):
        if ax.ndim != 1 or ax.size == 0 or np.any(np.diff(ax) <= 0):
            raise ValueError(f"{name} axis must be a non-empty strictly increasing 1-D array")
    labels = np.empty((beta_axis.size, z_axis.size), dtype=object)
    r = np.empty((3, beta_axis.size, z_axis.size))
    for i, beta in enumerate(beta_axis):
        for j, z in enumerate(z_axis):
            triple = rates(beta, z)
            r[:, i, j] = triple.as_tuple()
            labels[i, j] = winner(triple)
    return labels.astype(str), r


def unconditional_norms(z: float, z0: float) -> tuple[float, float]:
    """Operator norms of ``Z = (L - z0)/z0`` and ``W = (L - z0)/(L + z0)``."""
    if not z0 > 0:
        raise ValueError("reference conductivity z0 must be positive")
    if z + z0 == 0:
        raise ValueError("W is undefined for z = -z0")
    norm_z = max(abs(z - z0) / z0, abs(1 - z0) / z0)
    norm_w = max(abs(z - z0) / abs(z + z0), abs(1 - z0) / (1 + z0))
    return norm_z, norm_w
