"""Fixed-point schemes for the Lippmann-Schwinger equation.

Phase 2 has unit conductivity and phase 1 conductivity ``z``.  The three
schemes differ by the reference conductivity ``z0`` and by the contrast
variable ``t`` in which their iterates are partial sums of a power series:

====  ================  ==========================
kind  z0                t
====  ================  ==========================
B     1                 z - 1
MS    (z + 1) / 2       (z - 1) / (z + 1)
EM    sqrt(z)           (sqrt(z) - 1) / (sqrt(z) + 1)
====  ================  ==========================

B and MS iterate ``eps <- E - Gamma1(Z eps)`` with the pointwise contrast
``Z = (L - z0) / z0``.  EM iterates the non-conforming field ``e`` and
recovers a compatible field ``E - Gamma1(Z e)`` at each step.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from . import field
from .field import Grid2D
from .greens import GreenVariant, apply_gamma1, apply_h1, divergence_residual
from .microstructure import Microstructure

log = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 1e6


class Scheme(str, enum.Enum):
    B = "B"
    MS = "MS"
    EM = "EM"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        key = str(value).upper().replace("-POL", "")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown scheme {value!r}; expected B, MS or EM") from None


class SchemeDomainError(ValueError):
    """The requested contrast is outside the scheme's definition domain."""


@dataclass(frozen=True)
class SchemeParams:
    """Reference medium and contrast for one scheme at conductivity ``z``.

    ``m1``, ``m2`` are the per-phase multipliers of the scheme's local
    operator: ``(L - z0)/z0`` for B and MS, ``(L - z0)/(L + z0)`` for EM.
    """

    kind: Scheme
    z: float
    z0: float
    t: float
    m1: float
    m2: float

    @property
    def contrast(self) -> tuple[float, float]:
        """Per-phase values of ``(L - z0)/z0``, whatever the scheme."""
        return (self.z - self.z0) / self.z0, (1.0 - self.z0) / self.z0


def scheme_params(kind, z: float) -> SchemeParams:
    kind = Scheme.parse(kind)
    z = float(z)
    if kind is Scheme.B:
        return SchemeParams(kind, z, 1.0, z - 1.0, z - 1.0, 0.0)
    if kind is Scheme.MS:
        if z == -1.0:
            raise SchemeDomainError("MS reference medium (z+1)/2 vanishes at z = -1")
        t = (z - 1.0) / (z + 1.0)
        return SchemeParams(kind, z, 0.5 * (z + 1.0), t, t, -t)
    if not z > 0:
        raise SchemeDomainError(f"EM scheme needs z > 0, got {z}")
    s = math.sqrt(z)
    t = (s - 1.0) / (s + 1.0)
    return SchemeParams(kind, z, s, t, t, -t)


@dataclass
class IterState:
    """Current iterate; ``eps`` is e^(k) for EM, ``tau`` its polarization form."""

    eps: np.ndarray
    k: int = 0
    E: tuple[float, float] = (1.0, 0.0)
    tau: np.ndarray | None = None


def _contrast_field(params: SchemeParams, micro: Microstructure) -> np.ndarray:
    return micro.phase_values(*params.contrast)


def _macro(E, grid: Grid2D) -> np.ndarray:
    return field.constant(grid, E)


def initial_state(params: SchemeParams, micro: Microstructure, E=(1.0, 0.0),
                  polarization: bool = False) -> IterState:
    """Zeroth partial sum: ``E`` for B/MS, ``2 z0 E / (L + z0)`` for EM."""
    grid = micro.grid
    Ef = _macro(E, grid)
    if params.kind is not Scheme.EM:
        return IterState(Ef, 0, tuple(E))
    weight = 2.0 * params.z0 / micro.phase_values(params.z + params.z0, 1.0 + params.z0)
    tau = 2.0 * params.z0 * Ef if polarization else None
    return IterState(weight * Ef, 0, tuple(E), tau)


def step_basic(state: IterState, params: SchemeParams, micro: Microstructure,
               variant="continuous") -> IterState:
    """One Picard step ``eps <- E - Gamma1((m1 chi1 + m2 chi2) eps)``."""
    if params.kind is Scheme.EM:
        raise ValueError("step_basic applies to the B and MS schemes")
    g = micro.phase_values(params.m1, params.m2) * state.eps
    eps = _macro(state.E, micro.grid) - apply_gamma1(g, variant, micro.grid)
    return replace(state, eps=eps, k=state.k + 1)


def step_em(state: IterState, params: SchemeParams, micro: Microstructure,
            variant="continuous") -> IterState:
    """Eyre-Milton update ``e <- e - 2 z0/(L + z0) [(I + Gamma0 dL) e - E]``."""
    if params.kind is not Scheme.EM:
        raise ValueError("step_em applies to the EM scheme")
    e = state.eps
    residual = e + apply_gamma1(_contrast_field(params, micro) * e, variant, micro.grid)
    residual -= _macro(state.E, micro.grid)
    weight = 2.0 * params.z0 / micro.phase_values(params.z + params.z0, 1.0 + params.z0)
    return replace(state, eps=e - weight * residual, k=state.k + 1)


def step_em_polarization(state: IterState, params: SchemeParams, micro: Microstructure,
                         variant="continuous") -> IterState:
    """EM step on the polarization ``tau = (L + z0) e``: ``tau <- -H1(W tau) + 2 z0 E``.

    The returned state carries both ``tau`` and the matching ``e``.
    """
    if params.kind is not Scheme.EM or state.tau is None:
        raise ValueError("step_em_polarization needs an EM state carrying tau")
    w = micro.phase_values(params.m1, params.m2)
    tau = 2.0 * params.z0 * _macro(state.E, micro.grid) - apply_h1(w * state.tau, variant, micro.grid)
    e = tau / micro.phase_values(params.z + params.z0, 1.0 + params.z0)
    return replace(state, eps=e, tau=tau, k=state.k + 1)


def em_conforming(e: np.ndarray, params: SchemeParams, micro: Microstructure,
                  variant="continuous", E=(1.0, 0.0)) -> np.ndarray:
    """Compatible field ``E - Gamma1(Z e)`` attached to an EM iterate."""
    return _macro(E, micro.grid) - apply_gamma1(_contrast_field(params, micro) * e, variant, micro.grid)


def effective_estimate(eps: np.ndarray, z: float, micro: Microstructure) -> float:
    """``<sigma> . e1`` with ``sigma = L eps``."""
    return float(np.mean(micro.phase_values(z, 1.0) * eps[0]))


def em_series_estimate(e: np.ndarray, params: SchemeParams, micro: Microstructure) -> float:
    """``z0 + <(L - z0) e> . e1``: the truncated EM series for the effective conductivity.

    For the k-th EM iterate this equals ``z0 * sum_{j<=k+1} b_j t^j`` exactly,
    whereas :func:`effective_estimate` of the conforming field does not.
    """
    dl = micro.phase_values(params.z - params.z0, 1.0 - params.z0)
    return float(params.z0 + np.mean(dl * e[0]))


@dataclass
class SolveRow:
    k: int
    delta1: float
    delta2: float
    coef_indicator: float
    z_eff: float


@dataclass
class SolveReport:
    """Per-iteration indicators of one solve.

    Row ``k`` describes the k-th iterate: ``delta1`` is the equilibrium
    residual of its flux, ``delta2`` the L2 distance to the previous iterate,
    ``coef_indicator`` the series term ``|d_k t^k|``.
    """

    params: SchemeParams
    variant: GreenVariant
    criterion: str
    tol: float
    rows: list[SolveRow] = dc_field(default_factory=list)
    status: str = "max_iter"
    eps: np.ndarray | None = dc_field(default=None, repr=False)

    @property
    def iterations(self) -> int:
        return self.rows[-1].k if self.rows else 0

    @property
    def z_eff(self) -> float:
        return self.rows[-1].z_eff if self.rows else float("nan")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def first_below(self, name: str, tol: float) -> int | None:
        """First iteration at which indicator ``name`` is <= ``tol``."""
        for r in self.rows:
            if getattr(r, name) <= tol:
                return r.k
        return None


CRITERIA = {"div": "delta1", "diff": "delta2", "coef": "coef_indicator"}


def solve(kind, micro: Microstructure, z: float, variant="continuous", criterion: str = "div",
          tol: float = 1e-8, max_iter: int = 1000, E=(1.0, 0.0),
          polarization: bool = False) -> SolveReport:
    """Iterate one scheme until ``criterion`` drops to ``tol``.

    Starts from the zeroth partial sum.  For EM the reported fields and
    estimates are those of the conforming field; ``polarization`` switches
    the EM recursion to its ``tau`` form (same iterates up to round-off).
    """
    from .series import iter_coefficients

    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {sorted(CRITERIA)}")
    params = scheme_params(kind, z)
    variant = GreenVariant.parse(variant)
    grid = micro.grid
    E = (float(E[0]), float(E[1]))
    e_norm = math.hypot(*E)
    report = SolveReport(params, variant, criterion, tol)

    em = params.kind is Scheme.EM
    if em:
        step = step_em_polarization if polarization else step_em
    else:
        step = step_basic
    state = initial_state(params, micro, E, polarization and em)
    coefs = iter_coefficients(params.kind, micro, variant)
    next(coefs)  # d_0
    conductivity = micro.phase_values(z, 1.0)

    def observed(s):
        return em_conforming(s.eps, params, micro, variant, E) if em else s.eps

    prev = observed(state)
    key = CRITERIA[criterion]
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            state = step(state, params, micro, variant)
            eps = observed(state)
            _, d_k = next(coefs)
            if not np.all(np.isfinite(eps)):
                report.status = "diverged"
                break
            row = SolveRow(
                k=state.k,
                delta1=divergence_residual(conductivity * eps, variant, grid),
                delta2=field.l2_norm(eps - prev),
                coef_indicator=abs(d_k * params.t ** state.k) * e_norm,
                z_eff=float(np.mean(conductivity * eps, axis=(-2, -1)) @ np.array(E)) / e_norm ** 2,
            )
            report.rows.append(row)
            prev = eps
            if not math.isfinite(row.delta2) or row.delta2 > DIVERGENCE_FACTOR * e_norm:
                report.status = "diverged"
                break
            if getattr(row, key) <= tol:
                report.status = "converged"
                break
    report.eps = prev
    log.debug("%s z=%g: %s after %d iterations", params.kind.value, z, report.status, report.iterations)
    return report
