"""Dirichlet characters modulo a prime, and the Kronecker characters chi_D."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import check_fundamental, factorize, is_prime, kronecker


@lru_cache(maxsize=None)
def primitive_root(q: int) -> int:
    if not is_prime(q):
        raise ValueError(f"q must be prime, got {q}")
    if q == 2:
        return 1
    primes = list(factorize(q - 1))
    for g in range(2, q):
        if all(pow(g, (q - 1) // p, q) != 1 for p in primes):
            return g
    raise AssertionError("no primitive root found")


@lru_cache(maxsize=None)
def _index_table(q: int) -> tuple[int, ...]:
    """ind[n] with g^ind[n] = n mod q; ind[0] = -1."""
    g = primitive_root(q)
    ind = [-1] * q
    v = 1
    for k in range(q - 1):
        ind[v] = k
        v = v * g % q
    return tuple(ind)


@lru_cache(maxsize=None)
def _roots(order: int) -> tuple[complex, ...]:
    # exact values at the quarter turns keep real characters exactly real
    out = []
    for k in range(order):
        if (4 * k) % order == 0:
            out.append((1, 1j, -1, -1j)[4 * k // order])
        else:
            out.append(cmath.exp(2j * math.pi * k / order))
    return tuple(complex(z) for z in out)


@dataclass(frozen=True)
class DirichletCharacter:
    """chi_j(g^k) = exp(2 pi i j k / (q-1)) for the least primitive root g."""

    modulus: int
    index: int
    values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        q = self.modulus
        if q < 3 or not is_prime(q):
            raise ValueError(f"modulus must be a prime >= 3, got {q}")
        if not 0 <= self.index < q - 1:
            raise ValueError("index out of range")
        ind = _index_table(q)
        roots = _roots(q - 1)
        vals = np.zeros(q, dtype=complex)
        for n in range(1, q):
            vals[n] = roots[self.index * ind[n] % (q - 1)]
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, n: int) -> complex:
        return self.values[n % self.modulus]

    def exponent(self, n: int) -> int | None:
        """chi(n) = exp(2 pi i e / (q-1)); None when q | n."""
        if n % self.modulus == 0:
            return None
        return self.index * _index_table(self.modulus)[n % self.modulus] % (self.modulus - 1)

    @property
    def generator(self) -> int:
        return primitive_root(self.modulus)

    @property
    def is_principal(self) -> bool:
        return self.index == 0

    @property
    def is_even(self) -> bool:
        # chi(-1) = exp(pi i j)
        return self.index % 2 == 0

    @property
    def is_real(self) -> bool:
        return (2 * self.index) % (self.modulus - 1) == 0

    @property
    def is_primitive(self) -> bool:
        return not self.is_principal

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, (-self.index) % (self.modulus - 1))

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.modulus != self.modulus:
            raise ValueError("moduli differ")
        return DirichletCharacter(self.modulus, (self.index + other.index) % (self.modulus - 1))


@dataclass(frozen=True)
class KroneckerCharacter:
    """n -> (D/n), a real primitive character modulo |D|."""

    disc: int

    def __post_init__(self):
        check_fundamental(self.disc)
        if self.disc == 1:
            raise ValueError("D = 1 gives the principal character")

    @property
    def modulus(self) -> int:
        return abs(self.disc)

    def __call__(self, n: int) -> int:
        return kronecker(self.disc, n)

    @property
    def values(self) -> np.ndarray:
        return np.array([kronecker(self.disc, r) for r in range(self.modulus)], dtype=float)

    is_principal = False
    is_primitive = True
    is_real = True

    @property
    def is_even(self) -> bool:
        return self.disc > 0

    def conj(self) -> "KroneckerCharacter":
        return self


def character_group(q: int) -> list[DirichletCharacter]:
    if not is_prime(q) or q < 3:
        raise ValueError(f"q must be an odd prime, got {q}")
    return [DirichletCharacter(q, j) for j in range(q - 1)]


def even_characters(q: int) -> list[DirichletCharacter]:
    return [c for c in character_group(q) if c.is_even]


def kronecker_character(D: int) -> KroneckerCharacter:
    return KroneckerCharacter(D)


def gauss_sum(chi) -> complex:
    q = chi.modulus
    re, im = [], []
    for h in range(1, q):
        z = complex(chi(h)) * cmath.exp(2j * math.pi * h / q)
        re.append(z.real)
        im.append(z.imag)
    return complex(math.fsum(re), math.fsum(im))


def even_orthogonality(q: int, h: int, a: int) -> float:
    """Sum over even chi mod q of chi(a) * conj(chi(h))."""
    if h % q == 0 or a % q == 0:
        raise ValueError("h and a must be prime to q")
    terms = [complex(c(a)) * complex(c(h)).conjugate() for c in even_characters(q)]
    return math.fsum(t.real for t in terms)
