import math
from fractions import Fraction

import mpmath
import pytest

from erwspeed import DivergenceError, DomainError, PrecisionError
from erwspeed.greens import (derived_constants, greens_interval, greens_power_origin,
                             greens_series_oracle, return_probabilities)

GOLDEN_8 = {1: 1.0786470121, 2: 1.2890027899, 3: 1.8315461113}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_d8_golden_values(n):
    g = greens_power_origin(8, n)
    assert g.value == pytest.approx(GOLDEN_8[n], abs=1e-8)
    assert g.error_radius <= 1e-8


def test_independent_mpmath_quadrature():
    mpmath.mp.dps = 20
    d = 7
    f = lambda t: mpmath.exp(-t) * mpmath.besseli(0, t / d) ** d
    ref = float(mpmath.quad(f, [0, 1, 4, 16, 64, 256, 1024, 4096, mpmath.inf]))
    g = greens_power_origin(d, 1)
    assert abs(g.value - ref) < 1e-8


@pytest.mark.parametrize("d,n", [(4, 2), (2, 1), (6, 3), (1, 1)])
def test_divergence(d, n):
    with pytest.raises(DivergenceError):
        greens_power_origin(d, n)
    assert not greens_interval(d, n).is_finite


def test_bad_arguments():
    with pytest.raises(DomainError):
        greens_power_origin(0, 1)
    with pytest.raises(DomainError):
        greens_power_origin(5, 1, tol=0.0)


def test_precision_error_carries_best_estimate():
    # d = 2n + 1: the tail decays like T^(-1/2) and cannot reach tol = 1e-14
    with pytest.raises(PrecisionError) as info:
        greens_power_origin(3, 1, tol=1e-14)
    value, radius = info.value.best
    assert 1.5 < value < 1.6 and radius > 1e-14


def test_return_probabilities_small_cases():
    assert return_probabilities(1, 4) == [1, 0, Fraction(1, 2), 0, Fraction(3, 8)]
    assert return_probabilities(2, 2)[2] == Fraction(1, 4)
    assert return_probabilities(3, 2)[2] == Fraction(1, 6)


def test_series_oracle_examples():
    assert greens_series_oracle(2, 1, 2) == Fraction(5, 4)
    assert greens_series_oracle(3, 2, 2) == 1 + Fraction(3, 6)


@pytest.mark.parametrize("d,n", [(5, 1), (7, 2), (8, 1), (8, 2), (8, 3), (9, 3)])
def test_series_is_a_lower_bound(d, n):
    lower = greens_series_oracle(d, n, 20)
    g = greens_power_origin(d, n)
    assert float(lower) <= g.value + g.error_radius
    assert greens_series_oracle(d, n, 18) <= lower


def test_series_converges_towards_value_at_high_d():
    g = greens_power_origin(12, 1)
    gap = g.value - float(greens_series_oracle(12, 1, 30))
    assert 0 <= gap < 1e-4


def test_monotone_in_d_and_n():
    vals = [greens_power_origin(d, 1).value for d in range(6, 13)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    assert all(v > 1 for v in vals)
    for d in (7, 9, 11):
        per_n = [greens_power_origin(d, n).value for n in (1, 2, 3)]
        assert per_n == sorted(per_n)


def test_known_inequality_d5():
    assert greens_power_origin(5, 2).value < 25 / 6


def test_derived_constants_d9():
    c = derived_constants(9)
    assert c.E0.mid == pytest.approx(0.213478, abs=2e-6)
    assert c.E1.mid == pytest.approx(0.631394, abs=2e-6)
    assert c.a_d.mid == pytest.approx(0.181266, abs=2e-6)
    assert c.eps_d.mid == pytest.approx(0.0100948, abs=2e-7)
    assert not c.divergent


def test_derived_constants_formulae_match_greens():
    d = 10
    c = derived_constants(d)
    g1, g2 = (greens_power_origin(d - 1, n).value for n in (1, 2))
    assert c.E0.mid == pytest.approx(d / (d - 1) * g1 - 1, rel=1e-12)
    assert c.E1.mid == pytest.approx((d / (d - 1)) ** 2 * g2 - 1, rel=1e-12)
    assert c.a_d.mid == pytest.approx(d / (d - 1) ** 2 * g2, rel=1e-12)


def test_E0_nonincreasing_in_d():
    vals = [derived_constants(d).E0.hi for d in range(4, 15)]
    assert all(x >= y for x, y in zip(vals, vals[1:]))


def test_divergent_fields_are_flagged():
    c = derived_constants(5)
    assert set(c.divergent) == {"E1", "a_d", "eps_d"}
    assert c.E0.is_finite
    with pytest.raises(DivergenceError):
        c.require("a_d")
    assert c.require("E0") is c.E0
    assert set(derived_constants(3).divergent) == {"E0", "E1", "a_d", "eps_d"}
    with pytest.raises(DomainError):
        derived_constants(1)


def test_E0_d6_below_published_estimate():
    assert derived_constants(6).E0.hi < 6 / 5 * 1.157 - 1
