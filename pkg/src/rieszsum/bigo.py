"""Growth of the error term LHS - main for the theta identities.

Big-O statements are checked as boundedness of |error| / x^(theta + margin)
on a grid.  A log-log slope is also fitted, but only reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGrid, HypothesisError
from .identities import RieszCase, lhs_riesz, rhs_main

MARGIN = 0.1


def theory_exponent(case: RieszCase) -> float | None:
    """Exponent of the proven error bound, or None outside its range."""
    rho = case.rho
    if case.kind == "t3_3":
        r1 = case.field.r1
        if rho > r1 / 2:
            return 2 * rho + 0.5 - (2 * rho + 1) / (2 * (r1 + 1))
        return None
    if case.kind == "t5_3":
        return (5 * rho + 1) / 3 if rho > 1 else None
    raise HypothesisError("error terms are studied for t3_3 and t5_3 only")


def error_term(case: RieszCase, x: float) -> float:
    theory_exponent(case)  # validates the kind
    return float(lhs_riesz(case, x) - rhs_main(case, x))


def default_grid(points: int = 24, lo: float = 20.0, hi: float = 200.0) -> list[float]:
    """Geometric grid moved to the nearest k + 1/2 below each point."""
    raw = np.geomspace(lo, hi, points)
    grid = [math.floor(v) + 0.5 for v in raw]
    if len(set(grid)) != len(grid):
        raise ValueError("grid too dense for half-integer offsets")
    return grid


@dataclass(frozen=True)
class ExponentFit:
    grid: tuple[float, ...]
    errors: tuple[float, ...]
    fitted_slope: float
    theory_slope: float | None
    normalized: tuple[float, ...] | None
    normalized_sup: float | None
    masked: int = 0

    def __post_init__(self):
        if len(self.grid) < 8:
            raise ValueError("a fit needs at least 8 grid points")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")

    def running_sup(self) -> list[float]:
        """sup of the normalized error over grid points up to each x."""
        if self.normalized is None:
            raise ValueError("no theory exponent to normalize by")
        return list(np.maximum.accumulate(self.normalized))

    def bounded_over_top_half(self) -> bool:
        """The running sup stops growing over the upper half of the grid."""
        run = self.running_sup()
        half = len(run) // 2
        return bool(math.isfinite(run[-1]) and run[-1] <= run[half])


def fit_exponent(case: RieszCase, x_grid=None, margin: float = MARGIN) -> ExponentFit:
    grid = list(default_grid() if x_grid is None else x_grid)
    if len(grid) < 8:
        raise ValueError("a fit needs at least 8 grid points")
    errs = np.array([error_term(case, x) for x in grid])
    return fit_from_errors(grid, errs, theory_exponent(case), margin)


def fit_from_errors(grid, errs, theory: float | None, margin: float = MARGIN) -> ExponentFit:
    grid = np.asarray(grid, dtype=float)
    errs = np.asarray(errs, dtype=float)
    scale = np.max(np.abs(errs)) if len(errs) else 0.0
    vanish = np.abs(errs) <= 1e-12 * max(scale, 1e-300)
    if scale == 0 or vanish.sum() > len(errs) / 2:
        raise DegenerateGrid("more than half of the error samples vanish")
    # near zero crossings log|e| is meaningless; drop samples far below typical size
    keep = np.abs(errs) >= 1e-3 * np.median(np.abs(errs))
    slope = float(np.polyfit(np.log(grid[keep]), np.log(np.abs(errs[keep])), 1)[0])
    if theory is None:
        norm, sup = None, None
    else:
        norm = np.abs(errs) / grid ** (theory + margin)
        sup = float(norm.max())
        norm = tuple(float(v) for v in norm)
    return ExponentFit(tuple(float(v) for v in grid), tuple(float(v) for v in errs),
                       slope, theory, norm, sup, int((~keep).sum()))
