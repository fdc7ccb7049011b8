"""Acceptance criteria, one test each; outcomes are summarized at the end of the run."""

import math
import time
import timeit
from fractions import Fraction

import numpy as np
import pytest

from lsfft import field, generate
from lsfft.diagnostics import knee_detect
from lsfft.greens import GreenVariant, apply_gamma1
from lsfft.microstructure import Microstructure
from lsfft.ratemap import rates, regime_thresholds
from lsfft.schemes import initial_state, scheme_params, solve, step_basic, step_em, step_em_polarization
from lsfft.series import analytic_obnosov, numerical_coefficients, partial_sum_errors

pytestmark = pytest.mark.acceptance

# Obnosov cell at 128 x 128, MS scheme: (theoretical, numerical) coefficients as published
TABLE1 = [
    (1.000000000, 1.000000000), (0.500000000, 0.500000000), (0.125000000, 0.125000000),
    (0.625000000e-01, 0.625000000e-01), (0.234375000e-01, 0.234375000e-01),
    (0.117187500e-01, 0.117141463e-01), (0.488281250e-02, 0.488051063e-02),
    (0.244140625e-02, 0.243735662e-02), (0.106811523e-02, 0.106609042e-02),
    (0.534057617e-03, 0.535119341e-03), (0.240325928e-03, 0.240856801e-03),
    (0.120162964e-03, 0.125219714e-03), (0.550746918e-04, 0.576030820e-04),
    (0.275373459e-04, 0.342665252e-04), (0.127851963e-04, 0.161497831e-04),
    (0.639259815e-05, 0.133939187e-04), (0.299653038e-05, 0.649716274e-05),
    (0.149826519e-05, 0.822353999e-05), (0.707514118e-06, 0.407011143e-05),
    (0.353757059e-06, 0.666877547e-05), (0.168034603e-06, 0.332550840e-05),
    (0.840173016e-07, 0.600176714e-05), (0.400991667e-07, 0.299895396e-05),
    (0.200495833e-07, 0.559017674e-05), (0.960709201e-08, 0.279466942e-05),
    (0.480354601e-08, 0.527750045e-05),
]
THEORETICAL = np.array([row[0] for row in TABLE1])
NUMERICAL = np.array([row[1] for row in TABLE1])


def best_time(fn, repeat=20):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


@pytest.mark.xfail(strict=True, reason="the table quotes 9 significant digits; correct rounding alone "
                   "puts d_8 = 0.001068115234375 at 4.1e-9 from its quote 0.106811523e-02")
def test_criterion_1a_theoretical_column_literal_tolerance(record):
    d = analytic_obnosov("MS", 25).d_array()
    rel = np.abs(d - THEORETICAL) / THEORETICAL
    ok = rel.max() <= 1e-9
    record("criterion 1a", ok, f"max rel dev {rel.max():.2e} at k={int(rel.argmax())} vs 1e-9 "
           "(quote rounding, see 1b)")
    assert ok


def test_criterion_1b_theoretical_column_quoted_digits(record):
    coeffs = analytic_obnosov("MS", 25)
    d = coeffs.d_array()
    # every exact value must round to the published 9-digit quote
    digits = all(float("%.8e" % v) == q for v, q in zip(d, THEORETICAL))
    exact = all(isinstance(v, Fraction) for v in coeffs.d)
    dyadic = all(v.denominator & (v.denominator - 1) == 0 for v in coeffs.d)
    runtime = best_time(lambda: analytic_obnosov("MS", 25))
    ok = digits and exact and dyadic and runtime < 1e-3
    record("criterion 1b", ok, f"all 26 round to the quoted digits: {digits}, exact rationals={exact}, "
           f"{runtime * 1e3:.2f} ms")
    assert ok


def test_criterion_2_table_numerical_column(record, obnosov128):
    start = time.perf_counter()
    d = numerical_coefficients("MS", obnosov128, "continuous", 25).d_array()
    runtime = time.perf_counter() - start
    low = np.abs(d[:5] - NUMERICAL[:5]).max()
    vs_theory = np.abs(d - THEORETICAL) / THEORETICAL
    vs_quoted = np.abs(d - NUMERICAL) / NUMERICAL
    ratio25 = vs_theory[25]
    ok = low < 1e-12 and vs_theory[:11].max() <= 5e-3 and ratio25 >= 10 and runtime < 5
    record("criterion 2", ok, f"k<=4 dev {low:.1e}, k<=10 max rel {vs_theory[:11].max():.2e}, "
           f"k=25 ratio {ratio25:.0f}x, quoted column max rel {vs_quoted.max():.1e}, {runtime:.2f} s")
    assert ok


def test_criterion_3_refinement_convergence(record):
    exact = math.sqrt(1.3 / 3.1)
    start = time.perf_counter()
    errors = {}
    for n in (128, 256, 512):
        r = solve("MS", generate("obnosov", n), 0.1, "continuous", "diff", 1e-8, max_iter=1000)
        assert r.status == "converged"
        errors[n] = abs(r.z_eff - exact)
    runtime = time.perf_counter() - start
    e = [errors[n] for n in (128, 256, 512)]
    ok = e[2] < e[0] and e[0] >= e[1] >= e[2] and runtime < 60
    record("criterion 3", ok, "errors " + ", ".join(f"{v:.2e}" for v in e) + f", {runtime:.1f} s")
    assert ok


def _checked_decrease(errs, floor=1e-14):
    sampled = errs[10::10]
    live = sampled[sampled > floor]
    return bool(np.all(np.diff(live) < 0) and np.all(np.diff(sampled) <= 0))


def test_criterion_4_extended_convergence(record):
    def run():
        return (partial_sum_errors(analytic_obnosov("B", 500), -0.3),
                partial_sum_errors(analytic_obnosov("MS", 500), -10.0))
    b_err, ms_err = run()
    runtime = max(best_time(lambda: partial_sum_errors(analytic_obnosov("B", 500), -0.3)),
                  best_time(lambda: partial_sum_errors(analytic_obnosov("MS", 500), -10.0)))
    ok = (_checked_decrease(b_err) and _checked_decrease(ms_err)
          and b_err[500] < 1e-3 and ms_err[500] < 1e-3 and runtime < 1e-3)
    record("criterion 4", ok, f"B(z=-0.3) err@500 {b_err[500]:.1e}, MS(z=-10) err@500 {ms_err[500]:.1e}, "
           f"{runtime * 1e3:.2f} ms per series")
    assert ok


@pytest.mark.xfail(strict=True, reason="quoted z0(3) = 0.23932 disagrees with its own formula, "
                   "(sqrt(4/3) - 1)^2 = 0.023932")
def test_criterion_5a_quoted_threshold(record):
    z0 = regime_thresholds(3)[0]
    ok = abs(z0 - 0.23932) <= 5e-5
    record("criterion 5a", ok, f"z0(3) = {z0:.6f} vs quoted 0.23932 (formula gives 0.023932)")
    assert ok


def test_criterion_5b_rate_identities(record):
    start = time.perf_counter()
    z0, z1, z2 = regime_thresholds(3)
    r = rates(3, z0)
    crossing = abs(r.r_b - r.r_em) <= 1e-10 * r.r_b
    betas = np.linspace(1.01, 100, 200)
    worst = math.inf
    for beta in betas:
        zs = np.linspace(-1 / beta, 100, 201)[1:]
        for z in zs:
            if z == 1:
                continue
            t = rates(beta, z)
            worst = min(worst, t.r_ms / t.r_b)
    products = [abs(regime_thresholds(b)[1] * regime_thresholds(b)[2] - 1) for b in (4, 5, 10, 100)]
    runtime = time.perf_counter() - start
    ok = (z1 == z2 == 1.0 and crossing and worst > 1 and max(products) <= 1e-12 and runtime < 1)
    record("criterion 5b", ok, f"z0(3)={z0:.5f} (B/EM crossing), z1=z2={z1:g}, min r_MS/r_B {worst:.4f}, "
           f"max |z1 z2 - 1| {max(products):.1e}, {runtime:.2f} s")
    assert ok


def test_criterion_6_projector_properties(record):
    rng = np.random.default_rng(6)
    start = time.perf_counter()
    worst = dict.fromkeys(("idempotence", "mean", "contraction", "symmetry", "positivity"), 0.0)
    for variant in GreenVariant:
        for _ in range(100):
            f, g = rng.standard_normal((2, 2, 32, 32))
            gf, gg = apply_gamma1(f, variant), apply_gamma1(g, variant)
            nf, ng = field.l2_norm(f), field.l2_norm(g)
            worst["idempotence"] = max(worst["idempotence"], field.l2_norm(apply_gamma1(gf, variant) - gf) / nf)
            worst["mean"] = max(worst["mean"], np.abs(field.mean(gf)).max())
            worst["contraction"] = max(worst["contraction"], field.l2_norm(gf) / nf - 1)
            worst["symmetry"] = max(worst["symmetry"], abs(field.inner(f, gg) - field.inner(gf, g)) / (nf * ng))
            worst["positivity"] = max(worst["positivity"], -field.inner(f, gf))
    runtime = time.perf_counter() - start
    ok = all(v <= 1e-10 for v in worst.values()) and runtime < 5
    record("criterion 6", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f", {runtime:.2f} s")
    assert ok


def test_criterion_7_scheme_equivalences(record, obnosov64):
    start = time.perf_counter()
    p = scheme_params("EM", 4.0)
    a, b = initial_state(p, obnosov64), initial_state(p, obnosov64, polarization=True)
    em_dev = 0.0
    for _ in range(20):
        a, b = step_em(a, p, obnosov64), step_em_polarization(b, p, obnosov64)
        em_dev = max(em_dev, np.abs(a.eps - b.eps).max())
    series_dev = 0.0
    micro = Microstructure.from_mask(np.random.default_rng(7).random((32, 32)) < 0.4)
    for kind, z in (("B", 1.6), ("MS", 0.1), ("MS", 12.0)):
        q = scheme_params(kind, z)
        multiplier = micro.phase_values(q.m1, q.m2)
        term = field.constant(micro.grid, (1.0, 0.0))
        total = term.copy()
        s = initial_state(q, micro)
        for _ in range(8):
            term = -apply_gamma1(multiplier * term)
            total = total + term
            s = step_basic(s, q, micro)
            series_dev = max(series_dev, np.abs(s.eps - total).max())
    runtime = time.perf_counter() - start
    ok = em_dev <= 1e-10 and series_dev <= 1e-10 and runtime < 5
    record("criterion 7", ok, f"EM classic/polarization {em_dev:.1e}, iterate/series {series_dev:.1e}, "
           f"{runtime:.2f} s")
    assert ok


def test_criterion_8_empirical_ordering(record, obnosov128):
    start = time.perf_counter()
    counts = {}
    for name, micro, z, kinds in (("obnosov", obnosov128, 0.5, ("B", "MS")),
                                  ("checkerboard", generate("checkerboard", 128), 100.0, ("MS", "EM"))):
        for kind in kinds:
            r = solve(kind, micro, z, "continuous", "diff", 1e-8, max_iter=5000)
            counts[name, kind] = r.iterations if r.status == "converged" else math.inf
    runtime = time.perf_counter() - start
    ok = (counts["obnosov", "MS"] < counts["obnosov", "B"]
          and counts["checkerboard", "EM"] < counts["checkerboard", "MS"] and runtime < 30)
    record("criterion 8", ok, f"obnosov z=0.5 MS {counts['obnosov', 'MS']} < B {counts['obnosov', 'B']}; "
           f"checkerboard z=100 EM {counts['checkerboard', 'EM']} < MS {counts['checkerboard', 'MS']}; "
           f"{runtime:.1f} s")
    assert ok


def test_criterion_9_indicator_ordering(record, obnosov128):
    start = time.perf_counter()
    r = solve("MS", obnosov128, 0.1, "continuous", "div", 1e-6, max_iter=1000)
    k1, k2, k3 = (r.first_below(c, 1e-6) for c in ("delta1", "delta2", "coef_indicator"))
    runtime = time.perf_counter() - start
    ok = None not in (k1, k2, k3) and k1 >= k2 >= k3 and runtime < 10
    record("criterion 9", ok, f"k(delta1)={k1} >= k(delta2)={k2} >= k(coef)={k3}, {runtime:.2f} s")
    assert ok


def test_criterion_10_knee_refinement(record):
    start = time.perf_counter()
    fine = numerical_coefficients("MS", generate("obnosov", 512), "continuous", 30)
    k128 = knee_detect(numerical_coefficients("MS", generate("obnosov", 128), "continuous", 30), fine).K
    k64 = knee_detect(numerical_coefficients("MS", generate("obnosov", 64), "continuous", 30), fine).K
    runtime = time.perf_counter() - start
    ok = k128 >= k64 - 2 and runtime < 30
    record("criterion 10", ok, f"K(128 vs 512)={k128}, K(64 vs 512)={k64}, {runtime:.1f} s")
    assert ok
