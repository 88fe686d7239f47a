"""G-kernels G^{0,m}_{2m,0}(y | 1/2 (m times), rho+1, 0 (m-1 times)).

Three evaluators:

* ``mellin_barnes``: trapezoidal quadrature of
  (1/2 pi i) \\int Gamma(1/2+s)^m y^s / (Gamma(rho+1-s) Gamma(-s)^(m-1)) ds.
  The path starts vertical at Re s = c and, past the saddle height
  t* = y^(-1/(2m)), bends left with a softplus profile.  Going left the
  integrand dies super-exponentially, so the bent path is the standard
  loop around the poles s = -1/2 - k and the quadrature needs no
  truncation correction.  Conjugate symmetry folds the path onto t >= 0.
* ``asymptotic``: for nu = y^(-1/(2m)) large the kernel is
  Re[C e^{2 i m nu} nu^mu sum_k c_k nu^-k] with mu = m/2 - rho - 1/2, from
  the differential equation the G-function satisfies.  The other
  exponentials are smaller by exp(-2 m sin(pi/m) nu).
* ``bessel_closed_form``: at m = 2, rho = 0 the kernel equals
  y^(-1/4) I_1(4 y^(-1/4)) with I_1 the Voronoi kernel.
"""

from __future__ import annotations

import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import NonConvergence
from .specfun import bessel_J, voronoi_kernel_I

DEFAULT_ABSCISSA = 0.25
ASYMPTOTIC_SWITCH = 20.0


@dataclass(frozen=True)
class MeijerKernelSpec:
    m: int
    rho: float
    c: float = DEFAULT_ABSCISSA
    tail_cutoff: float | None = None
    step: float | None = None
    rtol: float = 1e-12

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("m must be at least 2")
        # m = r1 + 1 and the identities need rho > r1/2 - 1
        if not self.rho > (self.m - 1) / 2 - 1:
            raise ValueError(f"rho must exceed {(self.m - 1) / 2 - 1} for m={self.m}")
        if not self.c > -0.5:
            raise ValueError("contour abscissa must lie right of the pole at -1/2")
        if self.step is not None and self.step <= 0:
            raise ValueError("step must be positive")
        if self.tail_cutoff is not None and self.tail_cutoff <= 0:
            raise ValueError("tail_cutoff must be positive")

    @property
    def parameters(self) -> tuple[float, ...]:
        return (0.5,) * self.m + (self.rho + 1.0,) + (0.0,) * (self.m - 1)


@dataclass(frozen=True)
class KernelValue:
    value: float
    est_abs_error: float
    method: str


# ---------------------------------------------------------------- Mellin-Barnes

def _path(c: float, tb: float, t: np.ndarray):
    # even bend profile keeps s(-t) = conj(s(t)) and s smooth at t = 0
    bend = np.logaddexp(0.0, t - tb) + np.logaddexp(0.0, -t - tb) - 2 * np.logaddexp(0.0, -tb)
    s = c + 1j * t - bend
    ds = 1j - (special.expit(t - tb) - special.expit(-t - tb))
    return s, ds


def _log_integrand(m: int, rho: float, logy: float, s: np.ndarray) -> np.ndarray:
    lg = m * special.loggamma(0.5 + s) - special.loggamma(rho + 1 - s) + s * logy
    if m > 1:
        lg = lg - (m - 1) * special.loggamma(-s)
    return lg


def _integrand(m, rho, logy, c, tb, t):
    s, ds = _path(c, tb, t)
    return np.exp(_log_integrand(m, rho, logy, s)) * ds


def _geometry(spec: MeijerKernelSpec, logy: float):
    tstar = math.exp(-logy / (2 * spec.m))
    tb = 1.5 * tstar + 3.0
    h0 = spec.step or min(0.2, 2.5 / (abs(logy) + 2 * spec.m * math.log(tb) + 2))
    return tb, h0


def _tail_end(spec: MeijerKernelSpec, logy: float, tb: float) -> float:
    if spec.tail_cutoff is not None:
        return spec.tail_cutoff
    # walk outward on a coarse grid until the integrand is e^-48 below its peak
    t = np.arange(0.0, tb + 400.0, 0.5)
    s, _ = _path(spec.c, tb, t)
    lg = _log_integrand(spec.m, spec.rho, logy, s).real
    lg = np.where(np.isfinite(lg), lg, -np.inf)
    peak = lg.max()
    beyond = np.nonzero((t > tb) & (lg < peak - 48.0))[0]
    if len(beyond) == 0:
        raise NonConvergence("Mellin-Barnes integrand does not decay along the path")
    return float(t[beyond[0]]) + 1.0


def mellin_barnes(spec: MeijerKernelSpec, y: float, max_halvings: int = 6) -> KernelValue:
    if not y > 0:
        raise ValueError("kernel argument must be positive")
    m, rho, c = spec.m, spec.rho, spec.c
    logy = math.log(y)
    tb, h = _geometry(spec, logy)
    T = _tail_end(spec, logy, tb)

    n = int(math.ceil(T / h))
    t = h * np.arange(n + 1)
    g = _integrand(m, rho, logy, c, tb, t)
    g[0] *= 0.5
    acc = g.sum()  # sum over current nodes with endpoint weights
    l1 = np.abs(g).sum()
    value = h * acc.imag / math.pi
    floor = 1e-15 * h * l1 / math.pi
    for _ in range(max_halvings):
        mid = h * (np.arange(n) + 0.5)
        gm = _integrand(m, rho, logy, c, tb, mid)
        acc = acc + gm.sum()
        l1 = l1 + np.abs(gm).sum()
        h /= 2
        n *= 2
        new = h * acc.imag / math.pi
        delta = abs(new - value)
        value = new
        floor = 1e-15 * h * l1 / math.pi
        if delta <= max(spec.rtol * abs(value), floor):
            return KernelValue(value, delta + floor, "mellin_barnes")
    raise NonConvergence("step halving did not settle", best=value,
                         detail={"delta": delta, "y": y})


def mellin_barnes_full(spec: MeijerKernelSpec, y: float, h: float | None = None) -> complex:
    """Unfolded quadrature over t in [-T, T]; the result should be real."""
    logy = math.log(y)
    tb, h0 = _geometry(spec, logy)
    h = h or h0 / 4
    T = _tail_end(spec, logy, tb)
    t = h * np.arange(int(math.ceil(T / h)) + 1)
    t = np.concatenate([-t[:0:-1], t])
    g = _integrand(spec.m, spec.rho, logy, spec.c, tb, t)
    return h * g.sum() / (2j * math.pi)


# ---------------------------------------------------------------- asymptotics

def _mu(m: int, rho: float) -> float:
    return m / 2 - rho - 0.5


@lru_cache(maxsize=64)
def asymptotic_coefficients(m: int, rho: float, K: int = 80) -> np.ndarray:
    """c_k of the oscillatory expansion, c_0 = 1."""
    a = [0.5] * m + [rho + 1.0] + [0.0] * (m - 1)
    alpha = [2 * m * (aj - 1) for aj in a]
    lam = 2j * m
    mu = _mu(m, rho)

    def shift_poly(beta):
        # coefficients in nu^{beta + r} of prod_j (theta + alpha_j) applied to
        # e^{lam nu} nu^beta, divided by e^{lam nu} nu^beta
        v = np.zeros(2 * m + 1, complex)
        v[0] = 1
        for al in alpha:
            nv = (beta + np.arange(2 * m + 1) + al) * v
            nv[1:] += lam * v[:-1]
            v = nv
        return v

    c = np.zeros(K, complex)
    c[0] = 1
    for k in range(1, K):
        acc = 0j
        for r in range(0, 2 * m - 1):
            j = k - 2 * m + 1 + r
            if 0 <= j < k:
                acc += shift_poly(mu - j)[r] * c[j]
        c[k] = -acc / shift_poly(mu - k)[2 * m - 1]
    c.setflags(write=False)
    return c


def asymptotic_constant(m: int, rho: float) -> complex:
    mu = _mu(m, rho)
    K = ((-1) ** (m - 1) * math.pi ** (-m) * (0.5j) ** m * np.exp(1j * math.pi * rho)
         * (2 * math.pi) ** (m - 0.5) / math.sqrt(2 * m) * np.exp(0.5j * math.pi * mu))
    return 2 * np.conj(K)


def asymptotic(m: int, rho: float, y):
    """Large-nu expansion; returns (values, error estimates) as arrays."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    nu = np.exp(-np.log(y) / (2 * m))
    c = asymptotic_coefficients(m, rho)
    inv = 1.0 / nu
    acc = np.full(nu.shape, c[0], dtype=complex)
    p = np.ones_like(nu)
    last = np.zeros_like(nu)
    done = np.zeros(nu.shape, dtype=bool)
    prev = np.full(nu.shape, np.inf)
    for k in range(1, len(c)):
        p = p * inv
        term = c[k] * p
        mag = np.abs(term)
        # stop each point at its smallest term (optimal truncation)
        active = ~done & (mag < prev)
        acc = np.where(active, acc + term, acc)
        last = np.where(active, mag, last)
        done |= ~active
        prev = np.where(active, mag, prev)
        if done.all() or (mag < 1e-18).all():
            break
    mu = _mu(m, rho)
    C = asymptotic_constant(m, rho)
    amp = abs(C) * nu ** mu
    phase = np.exp(2j * m * nu)
    val = (C * phase * nu ** mu * acc).real
    sub = amp * np.exp(-2 * m * math.sin(math.pi / m) * nu) * 10.0
    # last kept term, plus rounding in the phase 2 m nu
    err = amp * (last + (2 * m * nu + 10) * 2.2e-16 * np.abs(acc)) + sub
    return val, err


# ---------------------------------------------------------------- closed form

def g_kernel_bessel_m2(rho: float, y):
    if rho != 0:
        raise ValueError("the Bessel closed form is claimed only for rho = 0")
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("kernel argument must be positive")
    q = y ** -0.25
    out = q * voronoi_kernel_I(1, 4 * q)
    return float(out) if np.ndim(out) == 0 else out


def g_kernel(spec: MeijerKernelSpec, y: float) -> KernelValue:
    """Mellin-Barnes evaluation at one point (the reference evaluator)."""
    return mellin_barnes(spec, y)


# ---------------------------------------------------------------- batch evaluator

def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RIESZSUM_THREADS", "1")))
    except ValueError:
        return 1


class KernelEvaluator:
    """Vectorized kernel values for series work, with a per-point cache.

    Uses the closed form when (m, rho) = (2, 0), the asymptotic expansion
    for nu >= ``switch``, and Mellin-Barnes below it.
    """

    def __init__(self, m: int, rho: float, switch: float = ASYMPTOTIC_SWITCH,
                 spec: MeijerKernelSpec | None = None):
        self.m = m
        self.rho = rho
        self.switch = switch
        self.spec = spec or MeijerKernelSpec(m, rho)
        self.closed_form = (m == 2 and rho == 0)
        self._cache: dict[float, KernelValue] = {}
        self._lock = threading.Lock()

    def _mb(self, y: float) -> KernelValue:
        key = float(np.float64(y))
        with self._lock:
            hit = self._cache.get(key)
        if hit is None:
            hit = mellin_barnes(self.spec, key)
            with self._lock:
                self._cache[key] = hit
        return hit

    def evaluate_log(self, logy: np.ndarray):
        logy = np.asarray(logy, dtype=float)
        vals = np.empty(logy.shape)
        errs = np.empty(logy.shape)
        if self.closed_form:
            y = np.exp(logy)
            vals[:] = g_kernel_bessel_m2(0, y)
            errs[:] = 1e-15 * (np.abs(vals) + np.exp(-logy / 4))
            return vals, errs
        nu = np.exp(-logy / (2 * self.m))
        big = nu >= self.switch
        if big.any():
            vals[big], errs[big] = asymptotic(self.m, self.rho, np.exp(logy[big]))
        small = np.nonzero(~big)[0]
        if len(small):
            ys = np.exp(logy[small])
            workers = _threads()
            if workers > 1 and len(small) > 8:
                with ThreadPoolExecutor(workers) as pool:
                    out = list(pool.map(self._mb, ys))
            else:
                out = [self._mb(v) for v in ys]
            vals[small] = [kv.value for kv in out]
            errs[small] = [kv.est_abs_error for kv in out]
        return vals, errs

    def __call__(self, y):
        return self.evaluate_log(np.log(np.atleast_1d(np.asarray(y, dtype=float))))


# ---------------------------------------------------------------- iterated integral

@dataclass(frozen=True)
class ProbeValue:
    value: float
    est_abs_error: float
    low_accuracy: bool


def iterated_kernel_probe(m: int, rho: float, x: float, u_lo: float = 0.02,
                          u_hi: float = 60.0) -> ProbeValue:
    """sqrt(2/pi) \\int_0^oo u^(rho-1/2) cos(u) J_(rho+1/2)(x/u) du.

    The piece [u_hi, oo) is a Fourier integral handled by QAWF; [0, u_lo)
    is dropped, since J(x/u) oscillates ever faster there, and its size is
    bounded by integrating the envelope.  The result is only good to a few
    digits, which is all a third cross-check needs.
    """
    if m != 2:
        raise ValueError("the iterated-integral probe is implemented for m = 2 only")
    if x <= 0:
        raise ValueError("x must be positive")
    nu = rho + 0.5

    def amp(u):
        return u ** (rho - 0.5) * bessel_J(nu, x / u)

    edges = set(np.linspace(u_lo, u_hi, 400).tolist())
    mid = 0.0
    err = 0.0
    pts = sorted(edges)
    for a, b in zip(pts[:-1], pts[1:]):
        val, e = integrate.quad(lambda u: amp(u) * math.cos(u), a, b, limit=200)
        mid += val
        err += e
    tail, etail = integrate.quad(amp, u_hi, np.inf, weight="cos", wvar=1.0, limlst=200)
    # |J_nu(z)| <= sqrt(2/(pi z)) + O(z^-3/2) for large z: envelope of the dropped piece
    dropped = math.sqrt(2 / (math.pi * x)) * u_lo ** (rho + 1) / (rho + 1)
    value = math.sqrt(2 / math.pi) * (mid + tail)
    est = math.sqrt(2 / math.pi) * (err + etail + dropped)
    return ProbeValue(value, est, True)


def iterated_kernel_target(rho: float, x: float) -> float:
    """2^(1-rho) x^(rho-1/2) G_{4,0}^{0,2}(16/x^2) for comparison with the probe."""
    kv = g_kernel(MeijerKernelSpec(2, rho), 16.0 / x ** 2)
    return 2 ** (1 - rho) * x ** (rho - 0.5) * kv.value
