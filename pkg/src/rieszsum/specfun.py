"""Special functions used on both sides of the identities.

The fast paths delegate to :mod:`scipy.special`; slow reference
implementations live in :mod:`rieszsum.oracles` and are used by the tests.
The one piece computed here from scratch is the small-argument branch of
the Voronoi kernel -Y_1 - (2/pi) K_1, where the two 1/z singularities are
cancelled inside the series rather than numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import PoleError

EULER_GAMMA = 0.57721566490153286060651209
LOG_2 = math.log(2.0)
SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class Precision:
    working: str = "binary64"
    sum_mode: str = "compensated"
    target_abs_tol: float = 1e-12

    def __post_init__(self):
        if self.target_abs_tol <= 0:
            raise ValueError("target_abs_tol must be positive")
        if self.sum_mode not in ("plain", "compensated"):
            raise ValueError(f"unknown sum_mode {self.sum_mode!r}")


DEFAULT_PRECISION = Precision()


def total(values, mode: str = "compensated") -> complex | float:
    """Sum of a sequence; compensated (fsum) unless mode='plain'."""
    arr = np.asarray(values)
    if mode == "plain":
        return arr.sum()
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))
    return math.fsum(arr.tolist())


def euler_gamma() -> float:
    return EULER_GAMMA


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def log_gamma(z):
    """log Gamma(z), continuous in z and real on the positive axis.

    Accepts scalars or arrays; exp(log_gamma(z)) = Gamma(z) for any branch,
    and this branch is the one that keeps Mellin-Barnes integrands smooth.
    """
    if np.isscalar(z):
        zc = complex(z)
        if _is_nonpositive_integer(zc):
            raise PoleError(f"log_gamma has a pole at {z}")
        return complex(special.loggamma(zc))
    return special.loggamma(np.asarray(z, dtype=complex))


def gamma(x: float) -> float:
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"gamma has a pole at {x}")
    return math.gamma(x)


def digamma(x: float) -> float:
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"digamma has a pole at {x}")
    if x <= 0:
        raise ValueError("digamma is provided for x > 0")
    return float(special.psi(x))


def gamma_prime_half() -> float:
    """Gamma'(1/2) = -sqrt(pi) (gamma + 2 log 2)."""
    return -SQRT_PI * (EULER_GAMMA + 2 * LOG_2)


def _check_x(x):
    if np.any(np.asarray(x) <= 0):
        raise ValueError("Bessel functions are provided for x > 0")


def bessel_J(nu: float, x):
    _check_x(x)
    return special.jv(nu, x)


def bessel_Y(nu: float, x):
    _check_x(x)
    return special.yv(nu, x)


def bessel_K(nu: float, x):
    _check_x(x)
    return special.kv(nu, x)


_FUSED_CUTOFF = 2.0


def _fused_I1(z: np.ndarray) -> np.ndarray:
    """-Y_1(z) - (2/pi) K_1(z) from the ascending series, 1/z terms removed.

    Only even k survive:
      -(4/pi) log(z/2) sum (z/2)^(2k+1) / (k!(k+1)!)
      + (2/pi)(z/2) sum (psi(k+1)+psi(k+2)) (z/2)^(2k) / (k!(k+1)!)
    """
    h = z / 2
    h2 = h * h
    s1 = np.zeros_like(z)
    s2 = np.zeros_like(z)
    term = np.ones_like(z)  # (z/2)^(2k) / (k!(k+1)!) at k = 0
    psi_k1 = -EULER_GAMMA  # psi(k+1)
    for k in range(0, 40):
        psi_k2 = psi_k1 + 1.0 / (k + 1)
        if k % 2 == 0:
            s1 += term
            s2 += (psi_k1 + psi_k2) * term
        term = term * h2 / ((k + 1) * (k + 2))
        psi_k1 = psi_k2
    return -(4 / math.pi) * np.log(h) * h * s1 + (2 / math.pi) * h * s2


def voronoi_kernel_I(nu: float, z):
    """-Y_nu(z) - (2/pi) K_nu(z); bounded near 0 when nu = 1."""
    _check_x(z)
    zz = np.asarray(z, dtype=float)
    scalar = zz.ndim == 0
    zz = np.atleast_1d(zz)
    out = -special.yv(nu, zz) - (2 / math.pi) * special.kv(nu, zz)
    if nu == 1:
        small = zz < _FUSED_CUTOFF
        if np.any(small):
            out[small] = _fused_I1(zz[small])
    return float(out[0]) if scalar else out
