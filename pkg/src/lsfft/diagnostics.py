"""Stopping indicators and detection of the discretization knee.

The knee is the order beyond which coefficients extracted on a pixel grid
stop tracking those of the continuous problem.  It is detected by comparing
the coefficients of two resolutions of the same microstructure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import field
from .greens import apply_gamma1, divergence_residual
from .microstructure import Microstructure
from .schemes import IterState, Scheme, SchemeParams, em_conforming, step_em
from .series import SeriesCoefficients

DEFAULT_KNEE_THRESHOLD = 0.05


@dataclass(frozen=True)
class IndicatorTriple:
    delta1: float  # equilibrium residual of the flux
    delta2: float  # distance to the next iterate
    coef: float    # series term |d_k t^k| |E|


def indicators(state: IterState, params: SchemeParams, micro: Microstructure,
               variant="continuous", d_series: Sequence[float] = ()) -> IndicatorTriple:
    """The three stopping indicators of the k-th iterate held by ``state``.

    ``delta2`` is the forward difference ``|eps^(k+1) - eps^(k)|``.  For B and
    MS it is evaluated as ``|Gamma1 sigma^(k)| / z0`` without stepping; for EM
    the next iterate is computed and both conforming fields are compared.
    """
    k = state.k
    if len(d_series) <= k:
        raise ValueError(f"d_series has {len(d_series)} terms, iterate k = {k} needs {k + 1}")
    grid = micro.grid
    conductivity = micro.phase_values(params.z, 1.0)
    if params.kind is Scheme.EM:
        eps = em_conforming(state.eps, params, micro, variant, state.E)
        nxt = step_em(state, params, micro, variant)
        delta2 = field.l2_norm(em_conforming(nxt.eps, params, micro, variant, state.E) - eps)
    else:
        eps = state.eps
        delta2 = field.l2_norm(apply_gamma1(conductivity * eps, variant, grid)) / abs(params.z0)
    sigma = conductivity * eps
    delta1 = divergence_residual(sigma, variant, grid)
    coef = abs(float(d_series[k]) * params.t ** k) * math.hypot(*state.E)
    return IndicatorTriple(delta1, delta2, coef)


@dataclass(frozen=True)
class KneeReport:
    K: int
    threshold: float
    coarse_n: int
    fine_n: int


def knee_detect(coarse: SeriesCoefficients, fine: SeriesCoefficients,
                threshold: float = DEFAULT_KNEE_THRESHOLD) -> KneeReport:
    """Last order before the two resolutions disagree by more than ``threshold``.

    Disagreement at order k means ``|d_k(coarse) - d_k(fine)| > threshold *
    max(|d_k(fine)|, machine eps)``; the knee is one order earlier.  Without
    disagreement the knee is the last common order.
    """
    if coarse.kind is not fine.kind:
        raise ValueError(f"cannot compare a {coarse.kind.value} series with a {fine.kind.value} series")
    if coarse.variant != fine.variant:
        raise ValueError("series were extracted with different Green variants")
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    n = min(len(coarse.d), len(fine.d))
    dc = coarse.d_array()[:n]
    df = fine.d_array()[:n]
    bad = np.abs(dc - df) > threshold * np.maximum(np.abs(df), np.finfo(float).eps)
    K = int(np.argmax(bad)) - 1 if bad.any() else n - 1
    return KneeReport(max(K, 0), threshold, coarse.grid_n, fine.grid_n)
