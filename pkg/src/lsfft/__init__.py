"""FFT-based Lippmann-Schwinger iterations for two-phase conductivity.

Fixed-point schemes (B, MS, EM), the power series their iterates sum, and
tools to read convergence off both.
"""

from .diagnostics import IndicatorTriple, KneeReport, indicators, knee_detect
from .field import Grid2D
from .greens import GreenVariant, apply_gamma1, apply_h1, divergence_residual, effective_frequency
from .microstructure import Microstructure, generate, load_pgm, save_pgm, volume_fraction
from .ratemap import (RateTriple, SingularityModel, best_scheme_grid, radii, rates,
                      regime_thresholds, unconditional_norms)
from .schemes import Scheme, SolveReport, scheme_params, solve
from .series import (SeriesCoefficients, analytic_obnosov, numerical_coefficients, obnosov_exact,
                     partial_sum_error, sqrt_series)

__version__ = "0.1.0"

__all__ = [
    "Grid2D", "GreenVariant", "IndicatorTriple", "KneeReport", "Microstructure", "RateTriple",
    "Scheme", "SeriesCoefficients", "SingularityModel", "SolveReport", "analytic_obnosov",
    "apply_gamma1", "apply_h1", "best_scheme_grid", "divergence_residual", "effective_frequency",
    "generate", "indicators", "knee_detect", "load_pgm", "numerical_coefficients", "obnosov_exact",
    "partial_sum_error", "radii", "rates", "regime_thresholds", "save_pgm", "scheme_params",
    "solve", "sqrt_series", "unconditional_norms", "volume_fraction",
]
