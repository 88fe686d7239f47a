import math

import numpy as np
import pytest

from rieszsum import bigo, identities as ids
from rieszsum.arith import FieldContext
from rieszsum.errors import DegenerateGrid, HypothesisError, NonConvergence
from rieszsum.identities import RieszCase

K5 = FieldContext.from_disc(5)
T3 = RieszCase("t3_3", rho=1.5, field=K5, h=1, q=3)
T5 = RieszCase("t5_3", rho=1.25, disc=5, h=1, q=3)


def test_theory_exponents():
    assert bigo.theory_exponent(T3) == pytest.approx(2 * 1.5 + 0.5 - 4 / 6)
    assert bigo.theory_exponent(T5) == pytest.approx((5 * 1.25 + 1) / 3)
    assert bigo.theory_exponent(RieszCase("t3_3", rho=1.0, field=K5, h=1, q=3)) is None
    assert bigo.theory_exponent(RieszCase("t5_3", rho=0.5, disc=5, h=1, q=3)) is None
    with pytest.raises(HypothesisError):
        bigo.theory_exponent(RieszCase.voronoi())


def test_default_grid():
    g = bigo.default_grid()
    assert len(g) == 24 and g[0] == 20.5 and g[-1] == 200.5
    assert all(v % 1 == 0.5 for v in g)
    assert all(b > a for a, b in zip(g, g[1:]))


def test_zero_errors_are_degenerate():
    grid = bigo.default_grid()
    with pytest.raises(DegenerateGrid):
        bigo.fit_from_errors(grid, np.zeros(len(grid)), 1.0)


def test_fit_needs_eight_points():
    with pytest.raises(ValueError):
        bigo.fit_from_errors([1.5, 2.5, 3.5], [1.0, 2.0, 3.0], 1.0)


def test_fit_recovers_power_law():
    grid = bigo.default_grid()
    errs = [2.0 * x ** 1.7 * (1 + 0.1 * math.sin(x)) for x in grid]
    fit = bigo.fit_from_errors(grid, errs, 1.7)
    assert abs(fit.fitted_slope - 1.7) < 0.05
    assert fit.bounded_over_top_half()


def test_error_term_matches_verify():
    x = 20.5
    pol = ids.TruncationPolicy(max_n=4000, start_n=1000)
    try:
        rep = ids.verify(T3, x, pol, tol=1e-2)
    except NonConvergence as exc:
        rep = exc.best
    assert bigo.error_term(T3, x) == float(rep.lhs - rep.rhs_main)


def test_error_term_continuous_within_unit_interval():
    xs = np.linspace(30.01, 30.99, 99)
    e = np.array([bigo.error_term(T5, x) for x in xs])
    # smooth between integers: second differences are tiny next to the values
    assert np.max(np.abs(np.diff(e, 2))) < 1e-2 * np.max(np.abs(e))
    jump = abs(bigo.error_term(T5, 31.0 + 1e-9) - bigo.error_term(T5, 31.0 - 1e-9))
    assert jump < 1e-3 * np.max(np.abs(e))  # rho > 0: the new term enters with weight 0


@pytest.mark.parametrize("case", [T3, T5], ids=["t3_3", "t5_3"])
def test_normalized_sup_bounded(case):
    fit = bigo.fit_exponent(case)
    assert math.isfinite(fit.normalized_sup)
    assert fit.bounded_over_top_half()


def test_slope_stable_under_grid_extension_t3_3():
    a = bigo.fit_exponent(T3)
    b = bigo.fit_exponent(T3, bigo.default_grid(48, 20, 400))
    assert abs(a.fitted_slope - b.fitted_slope) < 0.15
    assert b.normalized_sup <= a.normalized_sup * 1.5
