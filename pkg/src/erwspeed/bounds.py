"""Closed-form bounds on the expansion coefficients and their beta-derivatives.

All arithmetic is done on :class:`~erwspeed.interval.Interval` enclosures of
the Green's-function inputs, so the upper end of every reported quantity is a
valid upper bound given the quadrature error radii.

Notation (with G_n = G_{d-1}^{*n}(0)):

* ``pi_norm_bound``  bounds  sum_{m,x,y} |pi_m^(N)(x,y)|
* ``rho``, ``chi``, ``gamma`` bound the three Leibniz pieces of the
  beta-derivative of pi^(N) (first step, Delta-factors, interior kernels)
* the summary sums are ``d * sum_N`` of those, taken at beta = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .greens import DerivedConstants, derived_constants, greens_interval
from .interval import Interval

VERDICTS = ("monotone-all-beta", "monotone-small-beta", "inconclusive", "divergent")
_ZERO = Interval.point(0.0)


@dataclass(frozen=True)
class BoundInputs:
    d: int
    greens: dict  # n -> Interval for G_{d-1}^{*n}(0), n = 1, 2, 3
    constants: DerivedConstants

    @property
    def G1(self) -> Interval:
        return self.greens[1]

    @property
    def G2(self) -> Interval:
        return self.greens[2]

    @property
    def G3(self) -> Interval:
        return self.greens[3]


def bound_inputs(d: int, tol: float = 1e-8) -> BoundInputs:
    """Green's enclosures and derived constants for dimension ``d``.

    Never raises for divergence: infinite inputs become infinite enclosures.
    """
    greens = {n: (greens_interval(d - 1, n, tol) if d >= 2 else Interval.infinite())
              for n in (1, 2, 3)}
    if d >= 2:
        constants = derived_constants(d, tol)
    else:
        inf = Interval.infinite()
        constants = DerivedConstants(d, inf, inf, inf, inf, ("E0", "E1", "a_d", "eps_d"))
    return BoundInputs(d, greens, constants)


def _pow(x: Interval, k: int) -> Interval:
    # (a_d)^0 = 1 even when a_d is infinite
    return Interval.point(1.0) if k == 0 else x ** k


def pi_norm_bound(inputs: BoundInputs, beta: float, N: int) -> Interval:
    """Enclosure of the bound on ``sum_{m,x,y} |pi_m^(N)(x,y)|``."""
    if N < 1:
        raise ValueError("N >= 1")
    if beta == 0:
        return _ZERO
    d, c = inputs.d, inputs.constants
    b = Interval.point(beta)
    if N == 1:
        return b * c.E0 / d
    a_pow = _pow(c.a_d, N - 2) if N > 2 else Interval.point(1.0)
    return _pow(b, N) / (d * (d - 1)) * inputs.G1 * c.E1 * a_pow


def rho_bound(inputs: BoundInputs, beta: float, N: int) -> Interval:
    if beta == 0:
        return _ZERO
    d, c = inputs.d, inputs.constants
    b = Interval.point(beta)
    if N == 1:
        return b * c.E0 / (d * d)
    return _pow(b, N) * inputs.G1 * c.E1 / (d * d * (d - 1)) * _pow(c.a_d, N - 2)


def chi_bound(inputs: BoundInputs, beta: float, N: int) -> Interval:
    d, c = inputs.d, inputs.constants
    if N == 1:
        return c.E0 / d
    if beta == 0:
        return _ZERO
    b = Interval.point(beta)
    return N * _pow(b, N - 1) * inputs.G1 * c.E1 / (d * (d - 1)) * _pow(c.a_d, N - 2)


def gamma_bound(inputs: BoundInputs, beta: float, N: int) -> Interval:
    if beta == 0:
        return _ZERO
    d, c = inputs.d, inputs.constants
    b = Interval.point(beta)
    if N == 1:
        return b * inputs.G2 / ((d - 1) ** 2)
    if N == 2:
        return b * b * c.eps_d
    ba = b * c.a_d
    first = c.eps_d * b * b * _pow(ba, N - 2)
    second = ((N - 2) * 2 * _pow(b, 3) * c.E1 / ((d - 1) ** 4)
              * inputs.G1 * inputs.G3 * _pow(ba, N - 3))
    return first + second


def rho_chi_gamma_bounds(inputs: BoundInputs, beta: float, N: int):
    """``(rho^(N), chi^(N), gamma^(N))`` upper-bound enclosures."""
    if N < 1:
        raise ValueError("N >= 1")
    return rho_bound(inputs, beta, N), chi_bound(inputs, beta, N), gamma_bound(inputs, beta, N)


@dataclass(frozen=True)
class BoundReport:
    d: int
    beta: float
    pi_norm_by_N: tuple
    rho_sum: Interval
    chi_sum: Interval
    gamma_sum: Interval
    total: Interval
    a_d_condition: bool
    divergent: bool = False


def _closed_form_sums(inputs: BoundInputs):
    d, c = inputs.d, inputs.constants
    E0, E1, a, eps = c.E0, c.E1, c.a_d, c.eps_d
    G1, G2, G3 = inputs.G1, inputs.G2, inputs.G3
    one_minus_a = 1 - a
    rho = E0 / d + G1 * E1 / (d * (d - 1)) / one_minus_a
    chi = E0 + G1 * E1 * (2 - a) / (d - 1) / (one_minus_a * one_minus_a)
    gamma = (d * G2 / ((d - 1) ** 2) + eps * d / one_minus_a
             + 2 * d * E1 * G1 * G3 / ((d - 1) ** 4) / (one_minus_a * one_minus_a))
    return rho, chi, gamma


def _finite_below_one(x: Interval) -> bool:
    return x.is_finite and x.hi < 1


def summary_sums(inputs: BoundInputs, n_terms: int = 12) -> BoundReport:
    """``d * sum_N`` of the rho/chi/gamma bounds at beta = 1 (where they peak)."""
    a_ok = _finite_below_one(inputs.constants.a_d)
    pi_norms = tuple(pi_norm_bound(inputs, 1.0, N) for N in range(1, n_terms + 1))
    if not a_ok:
        inf = Interval.infinite()
        return BoundReport(inputs.d, 1.0, pi_norms, inf, inf, inf, inf, False, True)
    rho, chi, gamma = _closed_form_sums(inputs)
    total = rho + chi + gamma
    return BoundReport(inputs.d, 1.0, pi_norms, rho, chi, gamma, total, True,
                       not total.is_finite)


def iterated_sums(inputs: BoundInputs, beta: float = 1.0, rel: float = 1e-16):
    """``d * sum_N`` of :func:`rho_chi_gamma_bounds`, summed term by term.

    Terms are added until the geometric remainder (ratio ``beta * a_d``) is
    below ``rel``; the remainder bound is then added to the upper ends.
    Returns ``(rho, chi, gamma)`` enclosures.
    """
    d = inputs.d
    a = inputs.constants.a_d
    if not _finite_below_one(a):
        inf = Interval.infinite()
        return inf, inf, inf
    q = beta * a.hi
    sums = [_ZERO, _ZERO, _ZERO]
    N = 1
    while True:
        terms = rho_chi_gamma_bounds(inputs, beta, N)
        sums = [s + d * t for s, t in zip(sums, terms)]
        # a divergent component stays infinite; the others keep converging
        last = max((t.hi for t in terms if t.is_finite), default=0.0)
        if N >= 3 and (q == 0 or last * (N + 2) ** 2 * q / (1 - q) ** 2 < rel):
            break
        N += 1
    # each tail term is at most (N'/N)^2-weighted geometric in q after the last one
    slack = d * last * (N + 2) ** 2 * q / (1 - q) ** 2 if q else 0.0
    sums = [s if s.is_finite else Interval.infinite() for s in sums]
    return tuple(Interval(s.lo, s.hi + slack) for s in sums)


@dataclass(frozen=True)
class Certificate:
    d: int
    verdict: str
    total: float
    margin: float
    notes: str
    E0: float = math.nan
    a_d: float = math.nan
    report: BoundReport = field(default=None, repr=False)


def certify(d: int, tol: float = 1e-8) -> Certificate:
    """Monotonicity verdict for dimension ``d``.

    * ``monotone-all-beta``: a_d < 1 and d * (sum of derivative bounds) < 1,
      using the upper ends of all enclosures;
    * ``monotone-small-beta``: the beta-free term E_0(d)/d is below 1/d and all
      other sums are finite;
    * ``divergent``: some needed Green's function or N-sum is infinite;
    * ``inconclusive``: everything finite but neither criterion holds.
    """
    inputs = bound_inputs(d, tol)
    report = summary_sums(inputs)
    E0 = inputs.constants.E0
    a = inputs.constants.a_d
    e0_hi = E0.hi
    a_hi = a.hi
    if report.divergent:
        why = ", ".join(inputs.constants.divergent) or "a_d >= 1"
        return Certificate(d, "divergent", math.inf, -math.inf,
                           f"infinite inputs: {why}", e0_hi, a_hi, report)
    total = report.total.hi
    margin = 1 - total
    if total < 1:
        return Certificate(d, "monotone-all-beta", total, margin,
                           f"a_d <= {a_hi:.6f} < 1 and total <= {total:.6f} < 1",
                           e0_hi, a_hi, report)
    if e0_hi < 1:
        return Certificate(d, "monotone-small-beta", total, margin,
                           f"total {total:.6f} >= 1 but E_0({d}) = ({d}/{d - 1}) G_{d - 1}(0) - 1"
                           f" <= {e0_hi:.6f} < 1",
                           e0_hi, a_hi, report)
    return Certificate(d, "inconclusive", total, margin,
                       f"total {total:.6f} >= 1 and E_0({d}) <= {e0_hi:.6f} not below 1",
                       e0_hi, a_hi, report)
