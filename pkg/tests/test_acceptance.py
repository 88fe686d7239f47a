"""The ten acceptance criteria, each at its stated tolerance and time budget."""

import math
import time

import numpy as np
import pytest

from rieszsum import arith, bigo, identities as ids, lfunc
from rieszsum.arith import FieldContext
from rieszsum.characters import (KroneckerCharacter, character_group, even_characters,
                                 even_orthogonality, gauss_sum)
from rieszsum.identities import RieszCase
from rieszsum.meijer import MeijerKernelSpec, g_kernel, g_kernel_bessel_m2

import oracles

K5 = FieldContext.from_disc(5)


def test_criterion_01_voronoi(record):
    t0 = time.perf_counter()
    case = RieszCase.voronoi()
    x = 10.5
    brute = sum(oracles.divisor_count(n) for n in range(1, 11))
    lhs = ids.lhs_riesz(case, x)
    rep = ids.verify(case, x, tol=1e-3)
    best = min(abs(lhs - rep.rhs_main - v) for n, v in rep.rhs_series_partials if n <= 10_000)
    elapsed = time.perf_counter() - t0
    ok = brute == 27 and lhs == brute and best <= 1e-3 and elapsed <= 30
    record(1, ok, f"LHS={lhs:g} residual={best:.2e} (<=1e-3) time={elapsed:.2f}s")
    assert ok


def test_criterion_02_kernel_closed_form(record):
    t0 = time.perf_counter()
    spec = MeijerKernelSpec(2, 0.0)
    worst = 0.0
    for k in range(-4, 3):
        y = 10.0 ** k
        ref = g_kernel_bessel_m2(0.0, y)
        worst = max(worst, abs(g_kernel(spec, y).value - ref) / abs(ref))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed <= 10
    record(2, ok, f"max rel diff={worst:.2e} (<=1e-6) time={elapsed:.2f}s")
    assert ok


def test_criterion_03_main_term_collapse(record):
    x = 10.5
    gamma = float(oracles.euler_gamma())
    t32 = ids.rhs_main(RieszCase("t3_2", rho=0.0, field=FieldContext.rational()), x)
    vor = ids.rhs_main(RieszCase.voronoi(), x)
    closed = x * (math.log(x) + 2 * gamma - 1) + 0.25
    d1, d2 = abs(t32 - vor), abs(t32 - closed)
    ok = d1 <= 1e-12 and d2 <= 1e-12
    record(3, ok, f"|T3_2 main - Voronoi main|={d1:.1e}, vs closed form {d2:.1e} (<=1e-12)")
    assert ok


def test_criterion_04_t3_2_real_quadratic(record):
    t0 = time.perf_counter()
    rep = ids.verify(RieszCase("t3_2", rho=1.0, field=K5), 6.5, tol=1e-4)
    elapsed = time.perf_counter() - t0
    ok = rep.residual <= 1e-4 and elapsed <= 120
    record(4, ok, f"residual={rep.residual:.2e} (<=1e-4) N={rep.rhs_series_partials[-1][0]} "
                  f"time={elapsed:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def t3_3_report():
    return ids.verify(RieszCase("t3_3", rho=1.0, field=K5, h=1, q=3), 5.5, tol=1e-3)


def test_criterion_05_t3_3(record, t3_3_report):
    case = RieszCase("t3_3", rho=1.0, field=K5, h=1, q=3)
    rep = t3_3_report
    decomp = abs(ids.fkcos_decomposition(case, 5.5) - ids.lhs_riesz(case, 5.5))
    ok = rep.residual <= 1e-3 and decomp <= 1e-10
    record(5, ok, f"residual={rep.residual:.2e} (<=1e-3), decomposition diff={decomp:.1e} "
                  f"(<=1e-10)")
    assert ok


def test_criterion_06_t5_3(record, t3_3_report):
    rep = ids.verify(RieszCase("t5_3", rho=1.0, disc=5, h=1, q=3), 5.5, tol=1e-3)
    same = rep.lhs == t3_3_report.lhs
    ok = rep.residual <= 1e-3 and same
    record(6, ok, f"residual={rep.residual:.2e} (<=1e-3), LHS identical to criterion 5: {same}")
    assert ok


def test_criterion_07_l_value_routes(record):
    worst = 0.0
    for q in (5, 7, 11, 13):
        for chi in even_characters(q):
            if chi.is_principal:
                continue
            worst = max(worst, abs(lfunc.L1_logsin(chi) - lfunc.L1_series(chi)))
    fixture = 0.0
    for D in (5, 8, 12, 13):
        chi = KroneckerCharacter(D)
        s = lfunc.L1_series(chi)
        worst = max(worst, abs(lfunc.L1_logsin(chi) - s))
        fixture = max(fixture, abs(lfunc.class_number_L1(D) - s.real))
    ok = worst <= 1e-8 and fixture <= 1e-8
    record(7, ok, f"max route diff={worst:.1e}, class-number fixture diff={fixture:.1e} (<=1e-8)")
    assert ok


def test_criterion_08_characters(record):
    orth = gauss = sinp = 0.0
    for q in (3, 5, 7, 11, 13):
        for h in range(1, q):
            for a in range(1, q):
                expect = (q - 1) / 2 if (a - h) % q == 0 or (a + h) % q == 0 else 0.0
                orth = max(orth, abs(even_orthogonality(q, h, a) - expect))
        for chi in character_group(q):
            if not chi.is_principal:
                gauss = max(gauss, abs(abs(gauss_sum(chi)) ** 2 - q))
    for q in range(2, 14):
        sinp = max(sinp, abs(lfunc.sin_product(q) - q))
    ok = orth <= 1e-12 and gauss <= 1e-10 and sinp <= 1e-12
    record(8, ok, f"orthogonality {orth:.1e} (<=1e-12), |G|^2-q {gauss:.1e} (<=1e-10), "
                  f"sin product {sinp:.1e} (<=1e-12)")
    assert ok


def test_criterion_09_arithmetic(record):
    bad_f = 0
    for D in (5, 8, 12, 13):
        table = arith.f_K_table(FieldContext.from_disc(D), 10_000)
        bad_f += sum(int(table[n]) != arith.f_K_oracle(D, n) for n in range(1, 10_001))
    bad_r = sum(arith.r_D(-4, n, strict=False) != oracles.lattice_count(n)
                for n in range(1, 501))
    ok = bad_f == 0 and bad_r == 0
    record(9, ok, f"f_K mismatches={bad_f} (n<=1e4), r_D(-4,n) mismatches={bad_r} (n<=500)")
    assert ok


def test_criterion_10_big_o_boundedness(record):
    t0 = time.perf_counter()
    cases = {"t3_3": RieszCase("t3_3", rho=1.5, field=K5, h=1, q=3),
             "t5_3": RieszCase("t5_3", rho=1.25, disc=5, h=1, q=3)}
    parts, ok = [], True
    for name, case in cases.items():
        fit = bigo.fit_exponent(case)
        good = math.isfinite(fit.normalized_sup) and fit.bounded_over_top_half()
        ok &= good
        parts.append(f"{name} sup={fit.normalized_sup:.3f} bounded={good}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed <= 600
    record(10, ok, ", ".join(parts) + f" time={elapsed:.1f}s")
    assert ok
