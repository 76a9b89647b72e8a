"""Special functions and reproducible random streams."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError

_SERIES_LIMIT = 12.0
_TWO_OVER_PI = 2.0 / math.pi


def _j0_series(x: float) -> float:
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)) and k > 2:
            return total


def _j0_asymptotic(x: float) -> float:
    # Hankel expansion, truncated at the smallest term.
    p = 0.0
    q = 0.0
    term = 1.0
    k = 0
    prev = math.inf
    while abs(term) < prev and k < 60:
        if k % 2 == 0:
            p += term * (-1) ** (k // 2)
        else:
            q += term * (-1) ** (k // 2)
        prev = abs(term)
        k += 1
        term *= -((2 * k - 1) ** 2) / (k * 8.0 * x)
    chi = x - math.pi / 4
    return math.sqrt(_TWO_OVER_PI / x) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_j0(x: float) -> float:
    """Zeroth-order Bessel function of the first kind.

    Power series below |x| = 12, Hankel asymptotic expansion above.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"bessel_j0 needs a finite argument, got {x}")
    x = abs(x)
    if x < _SERIES_LIMIT:
        return _j0_series(x)
    return _j0_asymptotic(x)


def q_function(x):
    """Gaussian tail probability P(Z > x).

    Returned as ``np.longdouble``: for negative x the value is 1 - Q(|x|),
    and binary64 cannot resolve that difference well enough to invert it
    back to x within 1e-9 near x = -6.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("q_function needs finite arguments")
    upper = (0.5 * special.erfc(np.abs(x) / math.sqrt(2.0))).astype(np.longdouble)
    out = np.where(x >= 0, upper, np.longdouble(1) - upper)
    return out[()] if out.ndim == 0 else out


def inverse_q(p, tol: float = 1e-12) -> float:
    """Inverse of :func:`q_function` by bracketing bisection."""
    p = np.longdouble(p)
    if not (0.0 < p < 1.0):
        raise DomainError(f"inverse_q needs p in (0, 1), got {p}")
    lo, hi = -40.0, 40.0
    # invariant: q(lo) > p >= q(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if q_function(mid) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def upper_reg_gamma(shape, x):
    """P(G >= x) for G ~ Gamma(shape, 1)."""
    shape = np.asarray(shape, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(shape <= 0) or np.any(np.isnan(shape)):
        raise DomainError("upper_reg_gamma needs shape > 0")
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("upper_reg_gamma needs x >= 0")
    out = special.gammaincc(shape, x)
    return float(out) if out.ndim == 0 else out


@dataclass
class RngStream:
    """A reproducible random stream identified by ``(seed, stream_id)``.

    Backed by PCG64DXSM seeded through ``SeedSequence`` spawn keys, so
    ``substream(i)`` children are independent and can be handed to separate
    workers without affecting each other's output.
    """

    seed: int
    stream_id: int = 0
    path: tuple = ()
    _gen: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0 <= self.seed < 2**64) or not (0 <= self.stream_id < 2**64):
            raise DomainError("seed and stream_id must be unsigned 64-bit integers")

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
            self._gen = np.random.Generator(np.random.PCG64DXSM(ss))
        return self._gen

    def substream(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, (*self.path, int(index)))


def _check_positive(**kw):
    for name, value in kw.items():
        if not (value > 0) or not math.isfinite(value):
            raise DomainError(f"{name} must be positive and finite, got {value}")


def sample_standard_normal(stream: RngStream, size=None):
    return stream.generator.standard_normal(size)


def sample_gamma(stream: RngStream, shape: float, scale: float, size=None):
    _check_positive(shape=shape, scale=scale)
    return stream.generator.gamma(shape, scale, size)


def sample_poisson_interarrivals(stream: RngStream, rate: float, count: int):
    _check_positive(rate=rate)
    return stream.generator.exponential(1.0 / rate, int(count))


def sample_complex_normal(stream: RngStream, variance: float, size):
    """Circularly symmetric complex Gaussian samples with E|z|^2 = variance."""
    g = stream.generator
    s = math.sqrt(variance / 2.0)
    return s * g.standard_normal(size) + 1j * s * g.standard_normal(size)


def wilson_halfwidth(successes: int, n: int, z: float = 1.959963984540054) -> float:
    """Half-width of the 95% Wilson score interval.

    Unlike the Wald interval it stays positive when the estimate is 0 or 1.
    """
    if n <= 0:
        return math.inf
    p = successes / n
    z2 = z * z
    return z / (1 + z2 / n) * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n))
