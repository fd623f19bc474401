import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from katokech import Ordering, Param, Ratio, compare_actions, floor_certified, floor_sum_fast
from katokech.arithmetic import floor_sum, floor_sum_naive
from katokech.errors import AmbiguousComparison, FloorSumOverflow, InvalidParameter

from conftest import PARAMS


def brute_floor_sum(n, p, q):
    return sum(k * p // q for k in range(1, n + 1))


# ----- Param -----

@pytest.mark.parametrize("bad", [Fraction(0), Fraction(1), Fraction(-1, 3), Fraction(3, 2)])
def test_rational_param_rejects_out_of_range(bad):
    with pytest.raises(InvalidParameter):
        Param.rational(bad)


def test_real_param_needs_enough_precision():
    with pytest.raises(InvalidParameter):
        Param.real(lambda ctx: ctx.mpf(1) / 3, "1/3", prec=53)


@pytest.mark.parametrize(
    "token, exact",
    [("2/5", True), ("3/7", True), ("sqrt2/2", False), ("1/pi", False), ("0.25", False)],
)
def test_parse_modes(token, exact):
    assert Param.parse(token).is_exact is exact


@pytest.mark.parametrize("token", ["0", "1", "-1/2", "abc", "1/0"])
def test_parse_rejects(token):
    with pytest.raises((InvalidParameter, ValueError, ZeroDivisionError)):
        Param.parse(token)


def test_ratios_are_exact_in_rational_mode():
    p = Param.rational(2, 5)
    assert p.ratio(Ratio.INV_PLUS) == Fraction(5, 7)
    assert p.ratio(Ratio.INV_MINUS) == Fraction(5, 3)
    assert p.ratio(Ratio.A_PLUS) == Fraction(2, 7)
    assert p.ratio(Ratio.A_MINUS) == Fraction(2, 3)
    assert p.ratio(Ratio.SLOPE) == Fraction(3, 2)


def test_real_ratio_matches_independent_mpmath():
    p = Param.sqrt2_over_2()
    with mpmath.workprec(256):
        a = mpmath.sqrt(2) / 2
        ref = 1 / (1 + a)
        assert abs(p.ratio(Ratio.INV_PLUS) - ref) < mpmath.mpf(2) ** -180


# ----- floors -----

def test_floor_certified_known_values():
    p = Param.rational(2, 5)
    assert floor_certified(7, Ratio.INV_PLUS, p).value == 5
    assert floor_certified(7, Ratio.INV_PLUS, p).margin == 0
    assert floor_certified(3, Ratio.INV_MINUS, p).value == 5
    q = Param.sqrt2_over_2()
    # 10 / (1 + 0.70710678...) = 5.857...
    assert floor_certified(10, Ratio.INV_PLUS, q).value == 5


@given(st.integers(1, 10_000))
@settings(max_examples=200, deadline=None)
def test_real_floor_agrees_with_high_precision(k):
    p = Param.inv_pi()
    with mpmath.workprec(400):
        a = 1 / mpmath.pi
        assert floor_certified(k, Ratio.INV_MINUS, p).value == int(mpmath.floor(k / (1 - a)))
        assert floor_certified(k, Ratio.A_PLUS, p).value == int(mpmath.floor(k * a / (1 + a)))


def test_floor_sum_small_examples():
    assert floor_sum_fast(0, 3, 5) == 0
    assert floor_sum_fast(4, 1, 2) == 0 + 1 + 1 + 2
    assert floor_sum_fast(10, 7, 3) == brute_floor_sum(10, 7, 3)


def test_floor_sum_rejects_bad_denominator():
    with pytest.raises(ValueError):
        floor_sum_fast(5, 1, 0)


def test_floor_sum_overflow_guard():
    with pytest.raises(FloorSumOverflow):
        floor_sum_fast(2**70, 2**70, 3)


@given(st.integers(0, 2000), st.integers(0, 10**6), st.integers(1, 10**6))
@settings(max_examples=300, deadline=None)
def test_floor_sum_fast_matches_naive(n, p, q):
    assert floor_sum_fast(n, p, q) == floor_sum_naive(n, p, q)


@pytest.mark.parametrize("name", list(PARAMS))
@pytest.mark.parametrize("ratio", [Ratio.INV_PLUS, Ratio.INV_MINUS, Ratio.A_PLUS, Ratio.A_MINUS])
def test_floor_sum_matches_termwise(name, ratio):
    p = PARAMS[name]
    for n in (0, 1, 17, 250):
        expect = sum(floor_certified(k, ratio, p).value for k in range(1, n + 1))
        assert floor_sum(n, ratio, p) == expect


def test_strict_floor_sum_subtracts_integer_hits():
    p = Param.rational(2, 5)
    # k*a/(1+a) = 2k/7 is an integer for k = 7, 14
    assert floor_sum(14, Ratio.A_PLUS, p, strict=True) == floor_sum(14, Ratio.A_PLUS, p) - 2


@pytest.mark.parametrize("name", list(PARAMS))
def test_floor_identities(name):
    p = PARAMS[name]
    for k in range(1, 2001):
        inner = floor_certified(k, Ratio.A_PLUS, p)
        if inner.margin:
            assert floor_certified(k, Ratio.INV_PLUS, p).value == k - inner.value - 1
        assert floor_certified(k, Ratio.INV_MINUS, p).value == (
            k + floor_certified(k, Ratio.A_MINUS, p).value
        )


# ----- comparisons -----

weights = st.tuples(st.integers(0, 200), st.integers(0, 200))


@pytest.mark.parametrize("name", list(PARAMS))
@given(w1=weights, w2=weights, w3=weights)
@settings(max_examples=100, deadline=None)
def test_compare_actions_is_total_order(name, w1, w2, w3):
    p = PARAMS[name]
    c12 = compare_actions(w1, w2, p)
    assert compare_actions(w2, w1, p) == -c12
    if p.is_exact:
        a = p.exact
        tie = w1[0] * (1 - a) + w1[1] * (1 + a) == w2[0] * (1 - a) + w2[1] * (1 + a)
        assert (c12 == Ordering.EQUAL) == tie
    if c12 <= 0 and compare_actions(w2, w3, p) <= 0:
        assert compare_actions(w1, w3, p) <= 0


def test_compare_actions_matches_float_when_far():
    p = Param.sqrt2_over_2()
    a = math.sqrt(2) / 2
    rng = random.Random(3)
    for _ in range(500):
        w1 = (rng.randrange(100), rng.randrange(100))
        w2 = (rng.randrange(100), rng.randrange(100))
        f1 = w1[0] / (1 + a) + w1[1] / (1 - a)
        f2 = w2[0] / (1 + a) + w2[1] / (1 - a)
        if abs(f1 - f2) > 1e-9:
            assert compare_actions(w1, w2, p) == (Ordering.LESS if f1 < f2 else Ordering.GREATER)


def test_irrational_distinct_weights_never_tie():
    p = Param.inv_pi()
    assert compare_actions((3, 1), (1, 2), p) != Ordering.EQUAL
    assert compare_actions((2, 2), (2, 2), p) == Ordering.EQUAL


def test_rational_exact_tie():
    # a = 2/5: 7 * 2/(1+a) = 10 = 3 * 2/(1-a)... both 10
    p = Param.rational(2, 5)
    assert compare_actions((7, 0), (0, 3), p) == Ordering.EQUAL


def test_precision_raise_does_not_change_floors():
    lo, hi = Param.sqrt2_over_2(), Param.sqrt2_over_2().with_precision(512)
    for k in range(1, 3000, 7):
        for r in (Ratio.INV_PLUS, Ratio.INV_MINUS):
            assert floor_certified(k, r, lo).value == floor_certified(k, r, hi).value


def test_ambiguous_comparison_raises():
    from katokech.arithmetic import compare_combinations

    tiny = Param.real(lambda ctx: ctx.mpf(1) / 3 + ctx.mpf(2) ** -150, "near 1/3", prec=128)
    x = tiny.value
    # two combinations that differ by ~2^-150, below the certification guard
    with pytest.raises(AmbiguousComparison):
        compare_combinations((3, 0), (0, 1), x, 1)


# ----- batch floor sum -----

@given(
    st.lists(st.tuples(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(1, 10**6)), min_size=1, max_size=50)
)
@settings(max_examples=100, deadline=None)
def test_floor_sum_batch_matches_scalar(cases):
    from katokech.arithmetic import floor_sum_fast_batch

    n, p, q = zip(*cases)
    assert floor_sum_fast_batch(n, p, q).tolist() == [floor_sum_fast(*c) for c in cases]


def test_floor_sum_batch_large_entries_use_scalar_path():
    from katokech.arithmetic import floor_sum_fast_batch

    out = floor_sum_fast_batch([2**40, 5], [3, 3], [5, 2])
    assert out.dtype == object
    assert out.tolist() == [floor_sum_fast(2**40, 3, 5), floor_sum_fast(5, 3, 2)]


def test_floor_sum_batch_rejects_bad_input():
    from katokech.arithmetic import floor_sum_fast_batch

    with pytest.raises(ValueError):
        floor_sum_fast_batch([1, 2], [1, 1], [1, 0])
