import math

from hypothesis import given, strategies as st

from erwspeed.interval import Interval

finite = st.floats(-1e6, 1e6, allow_nan=False)


def _iv(a, b):
    return Interval(min(a, b), max(a, b))


def _pick(iv, s):
    return min(max(iv.lo + s * (iv.hi - iv.lo), iv.lo), iv.hi)


@given(finite, finite, finite, finite, st.floats(0, 1), st.floats(0, 1))
def test_arithmetic_encloses_point_results(a, b, c, e, s, t):
    x, y = _iv(a, b), _iv(c, e)
    px = _pick(x, s)
    py = _pick(y, t)
    assert px + py in x + y
    assert px - py in x - y
    assert px * py in x * y
    if not (y.lo <= 0 <= y.hi):
        assert px / py in x / y


def test_division_by_interval_containing_zero_is_unbounded():
    q = Interval(1, 2) / Interval(-1, 1)
    assert q.lo == -math.inf and q.hi == math.inf


def test_infinite_and_zero():
    assert not Interval.infinite().is_finite
    assert (Interval.point(0.0) * Interval(0, math.inf)).lo == 0


def test_outward_rounding():
    tenth = Interval.point(0.1)
    total = tenth + tenth + tenth
    assert 0.3 in total and total.lo < total.hi


def test_integer_power():
    assert (Interval(-2, 3) ** 2).lo == 0
    assert 9 in Interval(-2, 3) ** 2
    assert Interval(2, 3) ** 0 == Interval.point(1.0)
    assert (Interval(-3, -2) ** 2).lo > 0


@given(finite, finite, st.floats(0, 1), st.integers(0, 5))
def test_power_encloses_point_powers(a, b, s, k):
    x = _iv(a / 1e4, b / 1e4)
    px = _pick(x, s)
    assert px ** k in x ** k
