"""L(1, chi), L'(1, chi_D) and the Laurent data of zeta_K at s = 1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli

from .arith import RATIONAL, FieldContext
from .characters import KroneckerCharacter, gauss_sum
from .errors import NonConvergence
from .specfun import EULER_GAMMA

SERIES_TOL = 1e-12
MAX_TERMS = 10**7

# (h, fundamental unit) for a few real quadratic fields, cross-checks only
CLASS_NUMBER_FIXTURES = {
    5: (1, (1 + math.sqrt(5)) / 2),
    8: (1, 1 + math.sqrt(2)),
    12: (1, 2 + math.sqrt(3)),
    13: (1, (3 + math.sqrt(13)) / 2),
}


@dataclass(frozen=True)
class LaurentData:
    residue: float
    const_term: float
    source: str = "series"

    def __post_init__(self):
        if not self.residue > 0:
            raise ValueError("residue must be positive")


def L1_logsin(chi) -> complex:
    """L(1, chi) = -(G(chi)/q) sum_{n<q} conj(chi(n)) log(2 sin(pi n/q))."""
    if chi.is_principal:
        raise ValueError("L1_logsin needs a nonprincipal character")
    if not chi.is_even:
        raise ValueError("L1_logsin needs an even character")
    if not chi.is_primitive:
        raise ValueError("L1_logsin needs a primitive character")
    q = chi.modulus
    terms = [complex(chi(n)).conjugate() * math.log(2 * math.sin(math.pi * n / q))
             for n in range(1, q)]
    s = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    return -gauss_sum(chi) * s / q


_B = [float(b) for b in bernoulli(40)]


def _harmonic(r: int) -> float:
    return float(sum(Fraction(1, k) for k in range(1, r + 1)))


def _em_series(chi, log_power: int, K: int, J: int = 10):
    """sum_{n>=1} chi(n) (log n)^p / n for p in {0, 1}, with an error bound.

    Terms up to n = Kq are summed directly; the rest is split into the q
    residue classes and each class is summed by Euler-Maclaurin.  The
    divergent integral parts cancel because sum_a chi(a) = 0.
    """
    q = chi.modulus
    N = K * q
    n = np.arange(1, N + 1)
    vals = np.array([complex(chi(r)) for r in range(q)])[n % q]
    w = (np.log(n) ** log_power) / n
    head = vals * w
    parts = [complex(math.fsum(head.real.tolist()), math.fsum(head.imag.tolist()))]
    bound = 0.0
    for a in range(1, q):
        ca = complex(chi(a))
        if ca == 0:
            continue
        u = N + a
        lu = math.log(u)
        if log_power == 0:
            integral = -lu / q
            f0 = 1 / u

            def deriv(r):
                return (-1) ** r * math.factorial(r) * q ** r / u ** (r + 1)
        else:
            integral = -lu * lu / (2 * q)
            f0 = lu / u

            def deriv(r):
                return (q ** r * (-1) ** r * math.factorial(r)
                        * (lu - _harmonic(r)) / u ** (r + 1))
        corr = integral + f0 / 2
        for j in range(1, J + 1):
            corr -= _B[2 * j] / math.factorial(2 * j) * deriv(2 * j - 1)
        nxt = abs(_B[2 * J + 2] / math.factorial(2 * J + 2) * deriv(2 * J + 1))
        bound += abs(ca) * nxt
        parts.append(ca * corr)
    total = complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))
    return total, bound + 1e-16 * N


def _accelerated(chi, log_power: int, tol: float):
    if chi.is_principal:
        raise ValueError("the series needs a nonprincipal character")
    K = max(4, -(-2000 // chi.modulus))
    while True:
        value, bound = _em_series(chi, log_power, K)
        if bound <= tol:
            return value, bound
        if 2 * K * chi.modulus > MAX_TERMS:
            raise NonConvergence("tail bound not met", best=value)
        K *= 2


def L1_series(chi, tol: float = SERIES_TOL) -> complex:
    return _accelerated(chi, 0, tol)[0]


def Lprime1_series(chi, tol: float = SERIES_TOL) -> float:
    """L'(1, chi) = -sum chi(n) log n / n for a real character."""
    value = -_accelerated(chi, 1, tol)[0]
    return value.real if getattr(chi, "is_real", False) else value


def class_number_L1(D: int) -> float:
    """L(1, chi_D) from the class number formula, for the tabulated D."""
    h, eps = CLASS_NUMBER_FIXTURES[D]
    return 2 * h * math.log(eps) / math.sqrt(D)


@lru_cache(maxsize=None)
def laurent_coefficients(D: int) -> tuple[float, float]:
    """(residue, constant term) of zeta_K at s=1 for K of discriminant D > 1."""
    chi = KroneckerCharacter(D)
    L1 = L1_series(chi).real
    Lp = Lprime1_series(chi)
    return L1, EULER_GAMMA * L1 + Lp


def laurent_data(ctx: FieldContext) -> LaurentData:
    if ctx.kind == RATIONAL:
        return LaurentData(1.0, EULER_GAMMA, "series")
    res, const = laurent_coefficients(ctx.disc)
    return LaurentData(res, const, "series")


def laurent_data_fixture(D: int) -> LaurentData:
    """Residue from the class number formula; constant term still from series."""
    return LaurentData(class_number_L1(D), laurent_coefficients(D)[1], "class_number_fixture")


def sin_product(q: int) -> float:
    """prod_{n<q} 2 sin(pi n / q), which equals q."""
    return math.exp(math.fsum(math.log(2 * math.sin(math.pi * n / q)) for n in range(1, q)))


__all__ = [
    "CLASS_NUMBER_FIXTURES",
    "LaurentData",
    "L1_logsin",
    "L1_series",
    "Lprime1_series",
    "class_number_L1",
    "laurent_coefficients",
    "laurent_data",
    "laurent_data_fixture",
    "sin_product",
]
