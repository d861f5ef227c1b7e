from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from erwspeed import DomainError
from erwspeed.core import (ModelParams, WalkPath, as_fraction, extend, is_fresh, origin,
                           transition_probability, unit, unit_steps)


def test_as_fraction_uses_shortest_repr():
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(1) == 1


@pytest.mark.parametrize("d,beta", [(0, 0.5), (2, -0.1), (2, 1.5), (2.5, 0.0)])
def test_model_params_rejects_bad_input(d, beta):
    with pytest.raises(DomainError):
        ModelParams(d, beta)


def test_kernel_examples_d2():
    p = ModelParams(2, 0.5)
    o = origin(2)
    assert transition_probability(p, o, (1, 0), True, exact=True) == Fraction(3, 8)
    assert transition_probability(p, o, (-1, 0), True, exact=True) == Fraction(1, 8)
    assert transition_probability(p, o, (0, 1), True, exact=True) == Fraction(1, 4)
    assert transition_probability(p, o, (1, 0), False, exact=True) == Fraction(1, 4)
    assert transition_probability(p, o, (1, 0), True) == pytest.approx(0.375)


def test_kernel_rejects_non_neighbours():
    p = ModelParams(2, 0.5)
    with pytest.raises(DomainError):
        transition_probability(p, (0, 0), (1, 1), True)
    with pytest.raises(DomainError):
        transition_probability(p, (0, 0), (0, 0), False)
    with pytest.raises(DomainError):
        transition_probability(p, (0, 0), (0, 0, 1), False)


@given(d=st.integers(1, 12),
       beta=st.fractions(0, 1, max_denominator=50),
       excited=st.booleans())
def test_kernel_sums_to_one(d, beta, excited):
    p = ModelParams(d, beta)
    o = origin(d)
    total = sum(transition_probability(p, o, s, excited, exact=True) for s in unit_steps(d))
    assert total == 1


@given(d=st.integers(1, 8),
       b1=st.fractions(0, 1, max_denominator=30),
       b2=st.fractions(0, 1, max_denominator=30),
       k=st.integers(0, 7), sign=st.sampled_from([1, -1]))
def test_kernel_is_affine_in_beta(d, b1, b2, k, sign):
    s = unit(d, k % d, sign)
    o = origin(d)
    f = lambda b: transition_probability(ModelParams(d, b), o, s, True, exact=True)
    mid = (b1 + b2) / 2
    assert f(mid) == (f(b1) + f(b2)) / 2
    assert f(b2) - f(b1) == (b2 - b1) * s[0] / (2 * d)


def test_walkpath_freshness():
    path = WalkPath.start(2)
    assert is_fresh(path, (0, 0))
    path = extend(path, (1, 0))
    assert is_fresh(path, (1, 0))
    path = extend(path, (-1, 0))
    assert path.endpoint == (0, 0)
    assert not is_fresh(path, (0, 0))
    path = extend(path, (0, 1))
    assert is_fresh(path, (0, 1))
    assert path.length == 3 and len(path) == 4


def test_is_fresh_only_at_endpoint():
    path = extend(WalkPath.start(2), (1, 0))
    with pytest.raises(DomainError):
        is_fresh(path, (0, 0))


def test_extend_rejects_non_unit_steps():
    path = WalkPath.start(3)
    for bad in [(1, 1, 0), (0, 0, 0), (2, 0, 0), (1, 0)]:
        with pytest.raises(DomainError):
            extend(path, bad)


def test_extend_is_persistent():
    p0 = WalkPath.start(2)
    p1 = extend(p0, (1, 0))
    assert p0.length == 0 and p1.length == 1
    assert (1, 0) not in p0.visited


@given(st.lists(st.integers(0, 5), min_size=1, max_size=40))
def test_visited_index_matches_linear_scan(codes):
    d = 3
    steps = unit_steps(d)
    path = WalkPath.start(d)
    for c in codes:
        path = extend(path, steps[c])
        assert path.endpoint_fresh == (path.endpoint not in path.sites[:-1])
    assert path.visited == frozenset(path.sites)
    assert WalkPath.from_sites(path.sites) == path
