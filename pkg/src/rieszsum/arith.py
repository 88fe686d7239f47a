"""Exact integer arithmetic for the divisor-type coefficients.

Two layers live here.  Pointwise functions (``f_K``, ``d_chi``, ``r_D`` ...)
factor by trial division and are meant for small arguments and tests.  The
``*_table`` functions build whole coefficient arrays ``a[0..N]`` with a
Dirichlet-convolution sieve; series evaluation uses those.

Characters are passed as any object that is callable on an integer and
exposes ``modulus`` (see :mod:`rieszsum.characters`).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

RATIONAL = "rational"
REAL_QUADRATIC = "real_quadratic"


# ---------------------------------------------------------------- basics

def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError(f"divisors needs n >= 1, got {n}")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division."""
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == {n: 1}


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    return all(k == 1 for k in factorize(n).values())


def _jacobi(a: int, n: int) -> int:
    # n odd positive
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n), extended to all integer n."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 == 1 and D % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * _jacobi(D, n)


def is_fundamental_discriminant(D: int) -> bool:
    if D == 0:
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def check_fundamental(D: int) -> int:
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    return D


def w_D(D: int) -> int:
    """Number of automorphs of a positive definite form of discriminant D < 0."""
    if D >= 0:
        raise ValueError("w_D is tabulated only for negative discriminants")
    return {-4: 4, -3: 6}.get(D, 2)


# ---------------------------------------------------------------- fields

@dataclass(frozen=True)
class FieldContext:
    """The field K (rational or real quadratic) with its zeta Laurent data."""

    kind: str
    r1: int
    disc: int | None
    gamma_minus1: float
    gamma_0: float

    def __post_init__(self):
        if self.kind == RATIONAL:
            if self.r1 != 1 or self.disc is not None:
                raise ValueError("rational context has r1=1 and no discriminant")
        elif self.kind == REAL_QUADRATIC:
            if self.r1 != 2 or self.disc is None or self.disc <= 1:
                raise ValueError("real quadratic context needs r1=2 and disc > 1")
            check_fundamental(self.disc)
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if not self.gamma_minus1 > 0:
            raise ValueError("residue gamma_minus1 must be positive")

    @property
    def abs_disc(self) -> int:
        return 1 if self.disc is None else abs(self.disc)

    @property
    def degree(self) -> int:
        return self.r1

    @classmethod
    def rational(cls) -> "FieldContext":
        return cls(RATIONAL, 1, None, 1.0, float(np.euler_gamma))

    @classmethod
    def from_disc(cls, D: int) -> "FieldContext":
        from .lfunc import laurent_coefficients

        check_fundamental(D)
        if D <= 1:
            raise ValueError("a real quadratic field needs D > 1")
        res, const = laurent_coefficients(D)
        return cls(REAL_QUADRATIC, 2, D, res, const)

    @classmethod
    def real_quadratic(cls, d: int) -> "FieldContext":
        """K = Q(sqrt d) for a squarefree d > 1."""
        if d <= 1 or not is_squarefree(d):
            raise ValueError(f"Q(sqrt {d}) needs squarefree d > 1")
        return cls.from_disc(d if d % 4 == 1 else 4 * d)

    @classmethod
    def parse(cls, text: str) -> "FieldContext":
        """Parse ``Q`` or ``Qsqrt:<d>``."""
        t = text.strip()
        if t == "Q":
            return cls.rational()
        if t.startswith("Qsqrt:"):
            return cls.real_quadratic(int(t[len("Qsqrt:"):]))
        raise ValueError(f"field must be Q or Qsqrt:<d>, got {text!r}")

    def label(self) -> str:
        return "Q" if self.disc is None else f"disc:{self.disc}"


# ---------------------------------------------------------------- pointwise

def f_K(ctx: FieldContext, n: int) -> int:
    """Number of ideals of norm n."""
    if ctx.kind == RATIONAL:
        return 1
    return sum(kronecker(ctx.disc, d) for d in divisors(n))


def f_K_oracle(D: int, n: int) -> int:
    """Ideal count from the splitting type of each prime dividing n."""
    count = 1
    for p, k in factorize(n).items():
        s = kronecker(D, p)
        if s == 1:
            count *= k + 1
        elif s == -1:
            count *= 1 if k % 2 == 0 else 0
    return count


def d_chi(chi: Callable[[int], complex], n: int) -> complex:
    return sum(chi(k) for k in divisors(n))


def big_D_K(ctx: FieldContext, n: int) -> int:
    return sum(f_K(ctx, d) for d in divisors(n))


def big_D_K_chi(ctx: FieldContext, chi, n: int) -> complex:
    return sum(f_K(ctx, d) * chi(n // d) for d in divisors(n))


def _chi_D(D: int) -> Callable[[int], int]:
    return lambda k: kronecker(D, k)


def script_D(D: int, n: int) -> int:
    chi = _chi_D(D)
    return sum(d_chi(chi, k) for k in divisors(n))


def script_D_chi(D: int, chi, n: int) -> complex:
    chiD = _chi_D(D)
    return sum(d_chi(chiD, k) * chi(n // k) for k in divisors(n))


def r_D(D: int, n: int, strict: bool = True) -> int:
    """Representations of n by a full set of forms of discriminant D < 0.

    The divisor-sum formula is only claimed for n coprime to D; ``strict``
    turns a violation into an error, otherwise the formula is applied as is.
    """
    if D >= 0:
        raise ValueError("r_D needs a negative discriminant")
    check_fundamental(D)
    if n < 1:
        raise ValueError("r_D needs n >= 1")
    if strict and math.gcd(n, D) != 1:
        raise ValueError(f"gcd({n}, {D}) > 1: formula needs n coprime to D")
    return w_D(D) * sum(kronecker(D, k) for k in divisors(n))


# ---------------------------------------------------------------- tables

def dirichlet_convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """h[n] = sum_{dk=n} f[d] g[k] for 1 <= n <= N (index 0 ignored).

    Pairs (d, k) are grouped by min(d, k) <= sqrt(N), so the work is a few
    thousand strided vector updates instead of a Python loop over N.
    """
    N = min(len(f), len(g)) - 1
    dtype = np.result_type(f.dtype, g.dtype)
    h = np.zeros(N + 1, dtype=dtype)
    for a in range(1, math.isqrt(N) + 1):
        top = N // a
        h[a * a: a * top + 1: a] += f[a] * g[a: top + 1]
        if top > a:
            h[a * (a + 1): a * top + 1: a] += g[a] * f[a + 1: top + 1]
    return h


class _TableCache:
    def __init__(self):
        self._lock = threading.Lock()
        self._store: dict = {}

    def get(self, key, N: int, build: Callable[[int], np.ndarray]) -> np.ndarray:
        with self._lock:
            hit = self._store.get(key)
        if hit is not None and len(hit) > N:
            return hit[: N + 1]
        arr = build(N)
        arr.setflags(write=False)
        with self._lock:
            cur = self._store.get(key)
            if cur is None or len(cur) < len(arr):
                self._store[key] = arr
        return arr

    def clear(self):
        with self._lock:
            self._store.clear()


TABLES = _TableCache()


def _char_key(chi) -> tuple:
    return (type(chi).__name__, chi.modulus, getattr(chi, "index", None),
            getattr(chi, "disc", None))


def char_table(chi, N: int) -> np.ndarray:
    """chi(0..N) by periodic extension of one period."""
    q = chi.modulus
    period = np.array([chi(r) for r in range(q)])
    return period[np.arange(N + 1) % q]


def kronecker_table(D: int, N: int) -> np.ndarray:
    if D % 4 not in (0, 1):
        raise ValueError("periodic tables need D = 0 or 1 mod 4")
    q = abs(D)

    def build(M):
        period = np.array([kronecker(D, r) for r in range(q)], dtype=np.int64)
        return period[np.arange(M + 1) % q]

    return TABLES.get(("kron", D), N, build)


def ones_table(N: int) -> np.ndarray:
    a = np.ones(N + 1, dtype=np.int64)
    a[0] = 0
    return a


def f_K_table(ctx: FieldContext, N: int) -> np.ndarray:
    if ctx.kind == RATIONAL:
        return ones_table(N)
    return d_chi_D_table(ctx.disc, N)


def d_chi_D_table(D: int, N: int) -> np.ndarray:
    return TABLES.get(("dchiD", D), N,
                      lambda M: dirichlet_convolve(ones_table(M), kronecker_table(D, M)))


def big_D_K_table(ctx: FieldContext, N: int) -> np.ndarray:
    return TABLES.get(("DK", ctx.disc), N,
                      lambda M: dirichlet_convolve(ones_table(M), f_K_table(ctx, M)))


def big_D_K_chi_table(ctx: FieldContext, chi, N: int) -> np.ndarray:
    return TABLES.get(("DKchi", ctx.disc, _char_key(chi)), N,
                      lambda M: dirichlet_convolve(f_K_table(ctx, M), char_table(chi, M)))


def d_chi_table(chi, N: int) -> np.ndarray:
    return TABLES.get(("dchi", _char_key(chi)), N,
                      lambda M: dirichlet_convolve(ones_table(M), char_table(chi, M)))


def script_D_table(D: int, N: int) -> np.ndarray:
    return TABLES.get(("sD", D), N,
                      lambda M: dirichlet_convolve(ones_table(M), d_chi_D_table(D, M)))


def script_D_chi_table(D: int, chi, N: int) -> np.ndarray:
    return TABLES.get(("sDchi", D, _char_key(chi)), N,
                      lambda M: dirichlet_convolve(d_chi_D_table(D, M), char_table(chi, M)))


def class_divisor_table(f: np.ndarray, q: int, residues) -> np.ndarray:
    """A[k] = sum over r | k with r in the given residue classes mod q of f[k/r]."""
    N = len(f) - 1
    ind = np.zeros(N + 1, dtype=np.int64)
    for h in residues:
        ind[np.arange(N + 1) % q == h % q] += 1
    ind[0] = 0
    return dirichlet_convolve(f, ind)
