"""Convolution powers of the simple random walk Green's function at the origin.

``G_d^{*n}(0) = sum_k C(k+n-1, n-1) P_d(S_k = 0)``.  Embedding the walk in
continuous time with unit jump rate gives the one-dimensional representation

    G_d^{*n}(0) = int_0^inf t^(n-1)/(n-1)! * exp(-t) * I0(t/d)^d dt,

which is finite iff d > 2n.  The integral is split at a cutoff ``T``: the
body is integrated by adaptive quadrature, the tail is enclosed using

    (2 pi x)^(-1/2) - exp(-2x)/(2 pi x)  <=  exp(-x) I0(x)
        <=  (2 pi x)^(-1/2) (1 + 0.2072/x) + exp(-x)/2,

both obtained from ``exp(-x) I0(x) = (2/pi) int_0^1 exp(-2 x s^2) / sqrt(1-s^2) ds``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from scipy.integrate import quad
from scipy.special import i0e

from .errors import DivergenceError, DomainError, PrecisionError
from .interval import Interval

# 2(sqrt(2) - 1)/4 rounded up: chord bound for 1/sqrt(1-u) on [0, 1/2].
_BESSEL_TAIL_C = 0.2072
_T_MAX = 1e14


@dataclass(frozen=True)
class GreensValue:
    d: int
    n: int
    value: float
    error_radius: float

    def __post_init__(self):
        if self.error_radius < 0 or self.value - self.error_radius < 1:
            raise ValueError(f"inconsistent Green's value {self}")

    @property
    def interval(self) -> Interval:
        return Interval.around(self.value, self.error_radius)


def _tail_enclosure(d: int, n: int, T: float):
    """Enclosure ``(lo, hi)`` of the integral over ``[T, inf)``; needs T/d >= 1."""
    x = T / d
    amp = (d / (2 * math.pi)) ** (d / 2) * T ** (n - d / 2) / (math.factorial(n - 1) * (d / 2 - n))
    eps_up = _BESSEL_TAIL_C / x + 0.5 * math.exp(-x) * math.sqrt(2 * math.pi * x)
    eps_lo = math.exp(-2 * x) / math.sqrt(2 * math.pi * x)
    hi = amp * (1 + eps_up) ** d
    lo = amp * max(0.0, 1 - eps_lo) ** d
    return lo, hi


def _body(d: int, n: int, T: float, epsabs: float):
    fact = math.factorial(n - 1)

    def integrand(t):
        return t ** (n - 1) / fact * i0e(t / d) ** d

    edges = [0.0, 1.0]
    while edges[-1] < T:
        edges.append(min(2 * edges[-1], T))
    panel_tol = epsabs / len(edges)
    total = err = 0.0
    for a, b in zip(edges, edges[1:]):
        v, e = quad(integrand, a, b, epsabs=panel_tol, epsrel=1e-13, limit=200)
        total += v
        err += e
    return total, err


@lru_cache(maxsize=None)
def greens_power_origin(d: int, n: int = 1, tol: float = 1e-8) -> GreensValue:
    """``G_d^{*n}(0)`` with an absolute error radius at most ``tol``.

    Raises :class:`DivergenceError` when ``d <= 2n`` and
    :class:`PrecisionError` when the tail cannot be pushed below ``tol``.
    """
    if d < 1 or n < 1:
        raise DomainError("need d >= 1 and n >= 1")
    if not tol > 0:
        raise DomainError("tol must be positive")
    if d <= 2 * n:
        raise DivergenceError(f"G_{d}^{{*{n}}}(0) is infinite (needs d > 2n)")
    T = 32.0 * d
    lo, hi = _tail_enclosure(d, n, T)
    while (hi - lo) / 2 > tol / 4:
        T *= 2
        if T > _T_MAX:
            body, err = _body(d, n, T / 2, tol / 4)
            best = (body + (lo + hi) / 2, err + (hi - lo) / 2)
            raise PrecisionError(f"tail of G_{d}^{{*{n}}} too heavy for tol={tol}", best)
        lo, hi = _tail_enclosure(d, n, T)
    body, err = _body(d, n, T, tol / 4)
    radius = err + (hi - lo) / 2
    if radius > tol:
        raise PrecisionError(f"quadrature error {radius:.3g} exceeds tol={tol}",
                             (body + (lo + hi) / 2, radius))
    # widen by a few ulps for the final summation
    value = body + (lo + hi) / 2
    return GreensValue(d, n, value, radius + 8 * math.ulp(value))


def return_probabilities(d: int, kmax: int) -> list:
    """Exact ``P_d(S_k = 0)`` for k = 0..kmax.

    Closed walks of length 2j are counted as ``(2j)! * [t^j] (sum_i t^i/(i!)^2)^d``,
    the coefficient being built by convolving over the d coordinates.
    """
    jmax = kmax // 2
    base = [Fraction(1, math.factorial(i) ** 2) for i in range(jmax + 1)]
    acc = [Fraction(1)] + [Fraction(0)] * jmax
    for _ in range(d):
        acc = [sum(acc[i] * base[j - i] for i in range(j + 1)) for j in range(jmax + 1)]
    probs = []
    for k in range(kmax + 1):
        if k % 2:
            probs.append(Fraction(0))
        else:
            closed = acc[k // 2] * math.factorial(k)
            probs.append(closed / Fraction((2 * d) ** k))
    return probs


def greens_series_oracle(d: int, n: int = 1, kmax: int = 20) -> Fraction:
    """Exact partial sum ``sum_{k<=kmax} C(k+n-1, n-1) P_d(S_k = 0)``.

    A lower bound for ``G_d^{*n}(0)``, nondecreasing in ``kmax``.
    """
    if d < 1 or n < 1 or kmax < 0:
        raise DomainError("need d >= 1, n >= 1, kmax >= 0")
    probs = return_probabilities(d, kmax)
    return sum((math.comb(k + n - 1, n - 1) * p for k, p in enumerate(probs)), Fraction(0))


@dataclass(frozen=True)
class DerivedConstants:
    """Green's-function constants feeding the bound formulas.

    Fields that are infinite at this dimension hold ``Interval.infinite()``
    and are listed in ``divergent``; use :meth:`require` to get a
    :class:`DivergenceError` instead of an infinite enclosure.
    """

    d: int
    E0: Interval
    E1: Interval
    a_d: Interval
    eps_d: Interval
    divergent: tuple = ()

    def require(self, name: str) -> Interval:
        if name in self.divergent:
            raise DivergenceError(f"{name} is infinite for d={self.d}")
        return getattr(self, name)


def greens_interval(d: int, n: int, tol: float = 1e-8) -> Interval:
    """Enclosure of ``G_d^{*n}(0)``; infinite when it diverges."""
    if d <= 2 * n:
        return Interval.infinite()
    return greens_power_origin(d, n, tol).interval


def derived_constants(d: int, tol: float = 1e-8) -> DerivedConstants:
    """``E_0(d)``, ``E_1(d)``, ``a_d`` and ``eps(d)`` from ``G_{d-1}^{*n}(0)``, n = 1, 2, 3."""
    if d < 2:
        raise DomainError("derived constants need d >= 2")
    if d - 1 <= 2:
        inf = Interval.infinite()
        return DerivedConstants(d, inf, inf, inf, inf, ("E0", "E1", "a_d", "eps_d"))
    g1, g2, g3 = (greens_interval(d - 1, n, tol) for n in (1, 2, 3))
    q = Interval.point(d) / (d - 1)
    E0 = q * g1 - 1
    divergent = []
    if g2.is_finite:
        E1 = q * q * g2 - 1
        a_d = Interval.point(d) / ((d - 1) ** 2) * g2
    else:
        E1 = a_d = Interval.infinite()
        divergent += ["E1", "a_d"]
    if g3.is_finite and g2.is_finite:
        eps_d = (Interval.point(2 * d) / ((d - 1) ** 4) * g1 * g3
                 + E1 / (d * (d - 1) ** 2) * g2)
    else:
        eps_d = Interval.infinite()
        divergent.append("eps_d")
    return DerivedConstants(d, E0, E1, a_d, eps_d, tuple(divergent))
