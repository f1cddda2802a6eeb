"""Certified enclosures: containment, refinement, comparison, digits."""

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powertowers.evaluator import (
    Comparison,
    DigitUndecidable,
    RealBall,
    compare_values,
    decimal_digits,
    digits_to_bits,
    eval_ball,
    eval_interval,
)
from powertowers.expr import Rational, parse, tower

from oracles import TWO_TO_SQRT2_50

F = Fraction


# --- interval containment -----------------------------------------------------


def test_rational_point_interval():
    lo, hi = eval_interval(F(3, 7), 64)
    assert lo == hi == F(3, 7)


def _mp_value(expr):
    # plain (non-interval) high precision reference, computed top-down
    def atom_value(atom):
        v = mpmath.mpf(atom.base.num) / atom.base.den
        if atom.mid is not None:
            e = mpmath.mpf(atom.mid.num) / atom.mid.den
            if atom.top is not None:
                e = mpmath.power(e, mpmath.mpf(atom.top.num) / atom.top.den)
            v = mpmath.power(v, e)
        return v

    value = atom_value(expr.atoms[-1])
    for atom in reversed(expr.atoms[:-1]):
        value = mpmath.power(atom_value(atom), value)
    return value


@pytest.mark.parametrize(
    "text",
    [
        "(2/1)",
        "(1/3)",
        "(2/1)^(1/2)",
        "(3/4)^(5/7)",
        "(2/1)^[(2/1)^(1/2)]",
        "(5/2)^[(3/7)^(9/4)]",
        "(2/1)^{(3/1)^{(1/2)}}",
        "(1/2)^{(2/3)^(3/2)}",
        "(6/1)^{(6/1)^{(2/1)}}",
    ],
)
def test_enclosure_contains_reference_value(text):
    expr = parse(text)
    lo, hi = eval_interval(expr, digits_to_bits(40))
    assert lo <= hi
    with mpmath.workdps(120):
        v = _mp_value(expr)
        assert mpmath.mpf(lo.numerator) / lo.denominator <= v * (1 + mpmath.mpf(10) ** -100)
        assert v * (1 - mpmath.mpf(10) ** -100) <= mpmath.mpf(hi.numerator) / hi.denominator


def test_enclosure_width_shrinks_with_precision():
    expr = parse("(2/1)^[(2/1)^(1/2)]")
    widths = []
    for digits in (20, 40, 80):
        lo, hi = eval_interval(expr, digits_to_bits(digits))
        widths.append(hi - lo)
    assert widths[0] > widths[1] > widths[2]
    assert widths[2] < F(1, 10**70)


_small_rationals = st.builds(
    Rational, st.integers(min_value=1, max_value=9), st.integers(min_value=1, max_value=9)
)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(_small_rationals, _small_rationals), min_size=1, max_size=2
    )
)
def test_random_tower_enclosures_contain_value(parts):
    expr = tower(*[((a.num, a.den), (b.num, b.den)) for a, b in parts])
    lo, hi = eval_interval(expr, digits_to_bits(30))
    assert lo <= hi
    assert hi - lo <= F(1, 10**25) * max(hi, 1)
    with mpmath.workdps(90):
        v = _mp_value(expr)
        slack = mpmath.mpf(10) ** -70
        assert mpmath.mpf(lo.numerator) / lo.denominator <= v * (1 + slack)
        assert v * (1 - slack) <= mpmath.mpf(hi.numerator) / hi.denominator


# --- balls ---------------------------------------------------------------------


def test_eval_ball_honors_error_budget():
    expr = parse("(2/1)^(1/2)")
    ball = eval_ball(expr, F(1, 10**30))
    assert ball.radius <= F(1, 10**30)
    assert ball.contains(F(0)) is False
    lo, hi = eval_interval(expr, digits_to_bits(50))
    assert ball.midpoint - ball.radius <= hi
    assert lo <= ball.midpoint + ball.radius


def test_ball_relations():
    a = RealBall(F(9, 10), F(11, 10))
    b = RealBall(F(19, 10), F(21, 10))
    assert a.disjoint(b)
    assert not a.contains(F(3, 2))
    assert a.contains(F(21, 20))
    assert a.midpoint == F(1)
    assert a.radius == F(1, 10)
    outer = RealBall(F(1, 2), F(3, 2))
    assert outer.encloses(a)
    assert not a.encloses(outer)


# --- comparison ----------------------------------------------------------------


def test_compare_orders_distinct_values():
    assert compare_values(parse("(2/1)^(1/2)"), parse("(3/2)")) is Comparison.LESS
    assert compare_values(parse("(3/2)"), parse("(2/1)^(1/2)")) is Comparison.GREATER


def test_compare_certifies_equality_through_forms():
    assert (
        compare_values(parse("(2/1)^(2/3)"), parse("(4/1)^(1/3)"))
        is Comparison.EQUAL_EXACT
    )
    assert (
        compare_values(parse("(2/1)^{(2/1)^{(1/2)}}"), parse("(2/1)^[(2/1)^(1/2)]"))
        is Comparison.EQUAL_EXACT
    )


def test_compare_huge_magnitudes_symbolically():
    big = tower((2, 1), ((2, 1), (30, 1)))  # 2^(2^30)
    bigger = tower((3, 1), ((2, 1), (30, 1)))  # 3^(2^30)
    assert compare_values(big, bigger) is Comparison.LESS
    assert compare_values(big, parse("(2/1)")) is Comparison.GREATER
    assert compare_values(parse("(1/2)"), big) is Comparison.LESS


def _sqrt2_convergent(terms=105):
    # p/q -> |sqrt2 - p/q| < 1/q^2; q grows like 2.414^n
    p0, q0, p1, q1 = 1, 1, 3, 2
    for _ in range(terms):
        p0, q0, p1, q1 = p1, q1, 2 * p1 + p0, 2 * q1 + q0
    return p1, q1


def test_compare_reports_indistinguishable_at_tight_cap():
    p, q = _sqrt2_convergent()
    assert q > 10**38
    near = parse(f"({p}/{q})")
    root = parse("(2/1)^(1/2)")
    result = compare_values(near, root, cap_digits=64, start_digits=64)
    assert result is Comparison.INDISTINGUISHABLE


def test_compare_separates_convergent_with_enough_digits():
    p, q = _sqrt2_convergent()
    near = parse(f"({p}/{q})")
    root = parse("(2/1)^(1/2)")
    result = compare_values(near, root, cap_digits=512)
    assert result in (Comparison.LESS, Comparison.GREATER)
    # pin the side by exact arithmetic: sign of p^2/q^2 - 2
    expected = Comparison.GREATER if F(p, q) ** 2 > 2 else Comparison.LESS
    assert result is expected


# --- decimal digits --------------------------------------------------------------


def test_digits_of_exact_rationals():
    assert decimal_digits(parse("(1/3)"), 5) == ("33333", True)
    assert decimal_digits(parse("(1/2)"), 3) == ("500", True)
    assert decimal_digits(parse("(4/1)^(1/2)"), 4) == ("0000", True)
    assert decimal_digits(parse("(22/7)"), 6) == ("142857", True)


def test_digits_of_sqrt2_against_oracle():
    digits, exact = decimal_digits(parse("(2/1)^(1/2)"), 40)
    assert not exact
    # pure integer route: floor(sqrt(2) * 10^40) = isqrt(2 * 10^80)
    want = str(math.isqrt(2 * 10**80))[1:]
    assert len(want) == 40
    assert digits == want


def test_digits_of_two_to_sqrt2_match_frozen_oracle():
    digits, exact = decimal_digits(parse("(2/1)^[(2/1)^(1/2)]"), 50)
    assert not exact
    assert digits == TWO_TO_SQRT2_50.split(".")[1]


def test_digits_validate_k():
    with pytest.raises(ValueError):
        decimal_digits(parse("(1/2)"), 0)


def test_digits_to_bits_covers_decimal_precision():
    for d in (1, 10, 100, 1000):
        assert 10**d <= 2 ** digits_to_bits(d)
