"""Power-series coefficients of the effective conductivity.

Each scheme's iterates are partial sums of

    z_eff / z0 = sum_k b_k t^k,        z_eff = sum_k d_k t^k,

with microstructure-only coefficients.  :func:`numerical_coefficients`
extracts them on a pixel grid by repeated application of the scheme's
operator; :func:`analytic_obnosov` gives the exact ones for the square array
of square inclusions at volume fraction 1/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from typing import Iterator, Sequence

import numpy as np

from .greens import GreenVariant, apply_gamma1, apply_h1
from .microstructure import Microstructure
from .schemes import Scheme, scheme_params


@dataclass(frozen=True)
class SeriesCoefficients:
    kind: Scheme
    source: str  # "numerical" or "analytic"
    b: tuple
    d: tuple
    grid_n: int = 0
    variant: GreenVariant | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Scheme.parse(self.kind))
        if self.variant is not None:
            object.__setattr__(self, "variant", GreenVariant.parse(self.variant))
        if len(self.b) != len(self.d):
            raise ValueError("b and d must have the same length")

    @property
    def order(self) -> int:
        return len(self.d) - 1

    def d_array(self) -> np.ndarray:
        return np.asarray(self.d, dtype=float)

    def b_array(self) -> np.ndarray:
        return np.asarray(self.b, dtype=float)


def iter_coefficients(kind, micro: Microstructure, variant="continuous",
                      direction: int = 0) -> Iterator[tuple[float, float]]:
    """Yield ``(b_k, d_k)`` for k = 0, 1, 2, ... indefinitely.

    One operator application per order: with ``G_0 = chi e`` and
    ``G_j = chi * Op(G_{j-1})``, ``b_k = s (-1)^(k-1) <G_{k-1}> . e`` where
    ``chi`` is chi1 (B) or 2 chi1 - 1 (MS, EM), ``Op`` is Gamma1 (B, MS) or
    H1 (EM), and ``s`` is 2 for EM and 1 otherwise.
    """
    kind = Scheme.parse(kind)
    variant = GreenVariant.parse(variant)
    grid = micro.grid
    if kind is Scheme.B:
        chi, op, scale = micro.chi1.astype(float), apply_gamma1, 1.0
    else:
        chi = micro.chi_prime
        op, scale = (apply_h1, 2.0) if kind is Scheme.EM else (apply_gamma1, 1.0)
    G = np.zeros((2,) + grid.shape)
    G[direction] = chi
    b_prev, d = 1.0, 1.0
    yield 1.0, 1.0
    k = 1
    while True:
        b = scale * (-1) ** (k - 1) * float(G[direction].mean())
        if kind is Scheme.B:
            d = b
        elif kind is Scheme.MS:
            d = d + b
        else:
            d = d + b + b_prev
        yield b, d
        b_prev = b
        k += 1
        G = chi * op(G, variant, grid)


def numerical_coefficients(kind, micro: Microstructure, variant="continuous", K: int = 25,
                           direction: int = 0) -> SeriesCoefficients:
    """First ``K + 1`` coefficients extracted on the microstructure's grid."""
    if K < 1:
        raise ValueError("K must be >= 1")
    kind = Scheme.parse(kind)
    variant = GreenVariant.parse(variant)
    pairs = list(islice(iter_coefficients(kind, micro, variant, direction), K + 1))
    b, d = zip(*pairs)
    return SeriesCoefficients(kind, "numerical", tuple(b), tuple(d), micro.grid.n1, variant)


def sqrt_series(a: Sequence) -> list:
    """Coefficients of the square root of a power series with ``a[0] > 0``.

    Works on floats or on exact ``Fraction`` input when ``a[0]`` is a
    rational square.
    """
    if len(a) == 0:
        return []
    if not a[0] > 0:
        raise ValueError("sqrt_series needs a positive leading coefficient")
    if isinstance(a[0], Fraction):
        exact = _sqrt_dyadic(a)
        if exact is not None:
            return exact
        b0 = _rational_sqrt(a[0])
        if b0 is not None:
            b = [b0]
            for k in range(1, len(a)):
                acc = sum((b[i] * b[k - i] for i in range(1, k)), Fraction(0))
                b.append((a[k] - acc) / (2 * b0))
            return b
    b0 = math.sqrt(a[0])
    arr = np.zeros(len(a))
    arr[0] = b0
    av = np.asarray([float(v) for v in a])
    for k in range(1, len(a)):
        acc = arr[1:k] @ arr[k - 1:0:-1] if k > 1 else 0.0
        arr[k] = (av[k] - acc) / (2 * b0)
    return arr.tolist()


def _rational_sqrt(x: Fraction) -> Fraction | None:
    num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num * num == x.numerator and den * den == x.denominator:
        return Fraction(num, den)
    return None


def _square_series_scaled(kind: Scheme, K: int, S: int) -> tuple[list, list]:
    """Integer numerators of :func:`obnosov_square_series` over ``2**S``."""
    if kind is Scheme.B:
        a = [1 << S] + [(-1) ** (k - 1) << (S + 1 - 2 * k) for k in range(1, K + 1)]
        return a, list(a)
    if kind is Scheme.MS:
        c = [1 << S] + [1 << (S + 1 - k) for k in range(1, K + 1)]
        a = [1 << S, -(1 << S), -(1 << (S - 1))] + c[3:]
        return a[:K + 1], c
    a, c = obnosov_square_series(kind, K, exact=False)
    return [int(v) << S for v in a], [int(v) << S for v in c]


def _isqrt_series(A: Sequence[int], S: int) -> list | None:
    """Square root of a series with ``A[0] == 2**S``, numerators over ``2**S``.

    Returns exact Fractions, or None if some division is not exact at this scale.
    """
    B = [1 << S]
    mask = (1 << (S + 1)) - 1
    for k in range(1, len(A)):
        # symmetric convolution: pair i with k - i
        half = sum(B[i] * B[k - i] for i in range(1, (k + 1) // 2))
        middle = B[k // 2] ** 2 if k % 2 == 0 else 0
        num = (A[k] << S) - 2 * half - middle
        if num & mask:
            return None
        B.append(num >> (S + 1))
    return [Fraction(x, 1 << S) for x in B]


def _sqrt_dyadic(a: Sequence[Fraction]) -> list | None:
    """Exact square root for ``a[0] == 1`` and power-of-two denominators.

    Fixed-point integers scaled by ``2**S``; every division is checked to be
    exact, otherwise None is returned and the caller falls back to Fraction.
    """
    if a[0] != 1:
        return None
    S = 4 * len(a) + 8
    scale = 1 << S
    A = []
    for v in a:
        if v.denominator & (v.denominator - 1) or v.denominator > scale:
            return None
        A.append(v.numerator * (scale // v.denominator))
    B = [scale]
    mask = (1 << (S + 1)) - 1
    for k in range(1, len(a)):
        num = (A[k] << S) - sum(B[i] * B[k - i] for i in range(1, k))
        if num & mask:
            return None
        B.append(num >> (S + 1))
    return [Fraction(x, scale) for x in B]


def _convolve(x: Sequence, y: Sequence, K: int) -> list:
    return [sum(x[i] * y[k - i] for i in range(k + 1)) for k in range(K + 1)]


def obnosov_square_series(kind, K: int, exact: bool = True) -> tuple[list, list]:
    """Taylor coefficients ``(a, c)`` of ``(z_eff/z0)^2`` and ``z_eff^2`` in ``t``."""
    kind = Scheme.parse(kind)
    one = Fraction(1) if exact else 1.0
    if kind is Scheme.B:
        a = [one] + [2 * (-1) ** (k - 1) * one / 4 ** k for k in range(1, K + 1)]
        return a, list(a)
    if kind is Scheme.MS:
        a = [one, -one, -one / 2] + [one * 2 / 2 ** k for k in range(3, K + 1)]
        c = [one] + [one * 2 / 2 ** k for k in range(1, K + 1)]
        return a[:K + 1], c
    # EM: products of (1 -/+ t)/(1 +/- t) and (1 - t^3)/(1 + t^3)
    ratio_minus = [1] + [2 * (-1) ** i for i in range(1, K + 1)]            # (1-t)/(1+t)
    ratio_plus = [1] + [2] * K                                              # (1+t)/(1-t)
    cube = [1] + [2 * (-1) ** (i // 3) if i % 3 == 0 else 0 for i in range(1, K + 1)]  # (1-t^3)/(1+t^3)
    a = _convolve(ratio_minus, cube, K)
    c = _convolve(ratio_plus, cube, K)
    return [one * v for v in a], [one * v for v in c]


# z_eff/z0 and z_eff as products of binomials (1 + u t^m)^alpha, |t| < 1
_BINOMIAL_FORMS = {
    Scheme.B: (((0.75, 1, 0.5), (0.25, 1, -0.5)),) * 2,
    Scheme.MS: (((-1.0, 1, 1.0), (0.5, 1, 0.5), (-0.5, 1, -0.5)),
                ((0.5, 1, 0.5), (-0.5, 1, -0.5))),
    Scheme.EM: (((-1.0, 3, 0.5), (-1.0, 1, 0.5), (1.0, 1, -0.5), (1.0, 3, -0.5)),
                ((-1.0, 3, 0.5), (-1.0, 1, -0.5), (1.0, 1, 0.5), (1.0, 3, -0.5))),
}


_TINY = 1e-150


def _binomial_product(factors, K: int) -> np.ndarray:
    out = np.zeros(K + 1)
    out[0] = 1.0
    for u, m, alpha in factors:
        j = np.arange(1, K // m + 1)
        series = np.zeros(K + 1)
        series[0] = 1.0
        series[m::m] = np.cumprod((alpha - j + 1) / j * u)
        # flush the far tail so products never go subnormal (and slow)
        series[np.abs(series) < _TINY] = 0.0
        out = np.convolve(out, series)[:K + 1]
    return out


def analytic_obnosov(kind, K: int, exact: bool | None = None) -> SeriesCoefficients:
    """Exact series of the Obnosov formula for one scheme, orders ``0..K``.

    Rational arithmetic (square-root recursion on the squared series) is used
    by default up to K = 60.  The float path expands the closed form as a
    product of binomial series, which is O(K log K) and accurate to round-off.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    kind = Scheme.parse(kind)
    if exact is None:
        exact = K <= 60
    if exact:
        S = 4 * K + 12
        A, C = _square_series_scaled(kind, K, S)
        b, d = _isqrt_series(A, S), _isqrt_series(C, S)
        if b is None or d is None:
            a, c = obnosov_square_series(kind, K, exact=True)
            b, d = sqrt_series(a), sqrt_series(c)
        return SeriesCoefficients(kind, "analytic", tuple(b), tuple(d))
    fb, fd = _BINOMIAL_FORMS[kind]
    b = tuple(_binomial_product(fb, K).tolist())
    d = b if fd is fb else tuple(_binomial_product(fd, K).tolist())
    return SeriesCoefficients(kind, "analytic", b, d)


def obnosov_exact(z: float) -> float:
    """Effective conductivity ``sqrt((1 + 3z)/(3 + z))`` of the Obnosov cell."""
    z = float(z)
    if math.isinf(z):
        return math.sqrt(3.0) if z > 0 else _branch(z)
    if -3.0 <= z <= -1.0 / 3.0:
        return _branch(z)
    return math.sqrt((1.0 + 3.0 * z) / (3.0 + z))


def _branch(z):
    raise ValueError(f"z = {z} lies on the branch cut [-3, -1/3] of the Obnosov formula")


def partial_sum_error(coeffs: SeriesCoefficients, z: float, n: int) -> tuple[float, float]:
    """Partial sum ``sum_{k<=n} d_k t^k`` and its distance to the closed form."""
    if n > coeffs.order:
        raise ValueError(f"n = {n} exceeds the available order {coeffs.order}")
    exact = obnosov_exact(z)
    t = _contrast_variable(coeffs.kind, z)
    d = coeffs.d_array()[:n + 1]
    est = float(np.polynomial.polynomial.polyval(t, d))
    return est, abs(est - exact)


def partial_sum_errors(coeffs: SeriesCoefficients, z: float) -> np.ndarray:
    """Errors of every partial sum ``n = 0..K`` (vectorized :func:`partial_sum_error`)."""
    exact = obnosov_exact(z)
    t = _contrast_variable(coeffs.kind, z)
    d = coeffs.d_array()
    terms = d * t ** np.arange(len(d))
    return np.abs(np.cumsum(terms) - exact)


def _contrast_variable(kind: Scheme, z: float) -> float:
    # B and MS are defined on the whole real line (except MS at z = -1)
    return scheme_params(kind, z).t
