"""Interval refinement and digit-array construction over sequence sources."""

from fractions import Fraction

import pytest

from powertowers.cantor import (
    BudgetExhausted,
    Eq15Example,
    FileStream,
    RationalsCalkinWilf,
    TowerEnumeration,
    default_digit_rule,
    diagonal,
    diagonal_difference_profile,
    diagonal_records,
    eq15_sequence,
    index_of_value,
    nested_intervals,
    nested_records,
    profile_records,
    series_string,
)
from powertowers.expr import Rational

from oracles import CALKIN_WILF_PREFIX

F = Fraction


# --- sources ----------------------------------------------------------------


def test_calkin_wilf_walk_hits_known_prefix():
    source = RationalsCalkinWilf()
    got = [source.get(i).exact for i in range(1, len(CALKIN_WILF_PREFIX) + 1)]
    assert got == CALKIN_WILF_PREFIX


def test_calkin_wilf_has_no_repeats_early():
    source = RationalsCalkinWilf()
    seen = [source.get(i).exact for i in range(1, 400)]
    assert len(set(seen)) == len(seen)


def test_eq15_stream_opens_with_reciprocal_pairs():
    source = Eq15Example()
    labels = [source.get(i).label for i in range(1, 7)]
    assert labels == ["4/2", "2/4", "6/4", "4/6", "8/6", "6/8"]
    # labels stay unreduced while values are exact fractions
    assert source.get(1).exact == F(2)
    assert source.get(2).exact == F(1, 2)


def test_eq15_closed_form_pairs():
    low, high = eq15_sequence(0)
    assert (low, high) == (Rational(2, 4), Rational(4, 2))
    low, high = eq15_sequence(3)
    assert (low, high) == (Rational(8, 10), Rational(10, 8))
    assert low.as_fraction() * high.as_fraction() == 1
    with pytest.raises(ValueError):
        eq15_sequence(-1)


def test_tower_source_mirrors_enumeration():
    source = TowerEnumeration()
    assert source.get(1).label == "(1/1)"
    assert source.get(5).label == "(1/3)"
    assert source.get(5).exact == F(1, 3)
    # re-reads are cached, not recomputed
    assert source.get(2) is source.get(2)


def test_file_stream_accepts_expressions_and_decimals(tmp_path):
    path = tmp_path / "seq.txt"
    path.write_text("(2/1)^(1/2)\n\n0.5\n3\n(7/3)\n")
    source = FileStream(path)
    assert source.get(1).exact is None  # irrational tower
    assert source.get(1).expr is not None
    assert source.get(2).exact == F(1, 2)
    assert source.get(3).exact == F(3)
    assert source.get(4).exact == F(7, 3)
    assert source.get(5) is None  # finite stream ends


def test_file_stream_rejects_junk_with_line_number(tmp_path):
    path = tmp_path / "seq.txt"
    path.write_text("(2/1)\nhello\n")
    with pytest.raises(ValueError) as info:
        FileStream(path)
    assert ":2:" in str(info.value)


def test_index_of_value_finds_certified_matches():
    assert index_of_value(RationalsCalkinWilf(), 1) == 1
    assert index_of_value(RationalsCalkinWilf(), F(2, 3)) == 6
    assert index_of_value(Eq15Example(), F(1, 2)) == 2
    assert index_of_value(Eq15Example(), F(7), scan_budget=50) is None


# --- nested intervals ---------------------------------------------------------


def test_eq15_refinement_straddles_one():
    trace = nested_intervals(Eq15Example(), 0, 2, depth=5)
    assert len(trace.levels) == 5
    for level in trace.levels:
        assert level.alpha.exact < 1 < level.beta.exact
    labels = [(lv.alpha.label, lv.beta.label) for lv in trace.levels]
    assert labels[0] == ("2/4", "6/4")
    assert labels[4] == ("10/12", "14/12")


def test_eq15_level_pair_closed_form():
    trace = nested_intervals(Eq15Example(), 0, 2, depth=30)
    for n, level in enumerate(trace.levels):
        assert level.alpha.exact == F(2 + 2 * n, 4 + 2 * n)
        assert level.beta.exact == F(6 + 2 * n, 4 + 2 * n)
        # both endpoints sit at exact distance 1/(n+2) from 1
        assert abs(level.alpha.exact - 1) == F(1, n + 2)
        assert abs(level.beta.exact - 1) == F(1, n + 2)


def test_eq15_depth_eleven_reaches_22_24():
    trace = nested_intervals(Eq15Example(), 0, 2, depth=11)
    last = trace.levels[-1]
    assert (last.alpha.label, last.beta.label) == ("22/24", "26/24")


def test_nested_intervals_strictly_shrink():
    trace = nested_intervals(RationalsCalkinWilf(), 0, 1, depth=6)
    intervals = [(lv.alpha.exact, lv.beta.exact) for lv in trace.levels]
    lo, hi = F(0), F(1)
    for a, b in intervals:
        assert lo < a < b < hi
        lo, hi = a, b


def test_calkin_wilf_refinement_first_levels():
    trace = nested_intervals(RationalsCalkinWilf(), 0, 1, depth=3)
    picks = [(lv.alpha.exact, lv.beta.exact, lv.scanned) for lv in trace.levels]
    assert picks[0] == (F(1, 3), F(1, 2), 4)
    assert picks[1] == (F(3, 8), F(2, 5), 20)
    assert picks[2] == (F(8, 21), F(5, 13), 84)


def test_nested_replay_is_deterministic():
    a = nested_records(nested_intervals(RationalsCalkinWilf(), 0, 1, depth=5))
    b = nested_records(nested_intervals(RationalsCalkinWilf(), 0, 1, depth=5))
    assert a == b


def test_first_two_means_first_two_distinct_values(tmp_path):
    # a repeated value counts once, at its first index
    path = tmp_path / "seq.txt"
    path.write_text("0.5\n0.5\n0.25\n0.75\n")
    trace = nested_intervals(FileStream(path), 0, 1, depth=1)
    level = trace.levels[0]
    assert (level.alpha.index, level.beta.index) == (3, 1)
    assert (level.alpha.exact, level.beta.exact) == (F(1, 4), F(1, 2))


def test_endpoints_must_be_ordered():
    with pytest.raises(ValueError):
        nested_intervals(Eq15Example(), 2, 0, depth=1)
    with pytest.raises(ValueError):
        nested_intervals(Eq15Example(), 1, 1, depth=1)
    with pytest.raises(ValueError):
        nested_intervals(Eq15Example(), 0, 2, depth=0)


def test_budget_exhaustion_carries_partial_trace(tmp_path):
    path = tmp_path / "seq.txt"
    path.write_text("0.5\n0.25\n0.375\n0.3125\n")
    with pytest.raises(BudgetExhausted) as info:
        nested_intervals(FileStream(path), 0, 1, depth=3)
    err = info.value
    assert err.level == 2
    assert err.found == 0
    assert len(err.trace.levels) == 2
    assert err.trace.termination == "budget exhausted"
    assert err.trace.levels[1].alpha.exact == F(5, 16)


def test_budget_exhaustion_midway_through_a_level(tmp_path):
    path = tmp_path / "seq.txt"
    path.write_text("0.5\n0.25\n0.375\n")
    with pytest.raises(BudgetExhausted) as info:
        nested_intervals(FileStream(path), 0, 1, depth=3)
    assert info.value.level == 1
    assert info.value.found == 1
    assert len(info.value.trace.levels) == 1


def test_budget_caps_the_scanned_index():
    with pytest.raises(BudgetExhausted):
        nested_intervals(RationalsCalkinWilf(), 0, 1, depth=3, scan_budget=30)
    trace = nested_intervals(RationalsCalkinWilf(), 0, 1, depth=3, scan_budget=84)
    assert trace.levels[-1].scanned == 84


def test_tower_source_refinement_runs():
    trace = nested_intervals(TowerEnumeration(), 0, 1, depth=3)
    values = []
    for level in trace.levels:
        a = level.alpha.exact
        b = level.beta.exact
        values.append((level.alpha.label, a, level.beta.label, b))
    assert values[0][0] == "(1/3)"
    assert values[0][2] == "(1/2)"
    # level 2 picks the first irrational endpoint: (1/6)^(1/2)
    assert trace.levels[2].alpha.label == "(1/6)^(1/2)"
    assert trace.levels[2].alpha.exact is None


def test_nested_records_schema():
    rows = nested_records(nested_intervals(Eq15Example(), 0, 2, depth=2))
    assert list(rows[0]) == [
        "level",
        "alpha_index",
        "alpha",
        "beta_index",
        "beta",
        "alpha_value",
        "beta_value",
        "scanned",
    ]
    assert rows[0]["level"] == 0
    assert rows[0]["alpha"] == "2/4"
    assert rows[1]["beta"] == "8/6"


# --- diagonal ------------------------------------------------------------------


def test_default_rule_moves_every_digit():
    for d in range(10):
        assert default_digit_rule(d) != d
    assert default_digit_rule(0) == 5
    assert default_digit_rule(5) == 4


def test_diagonal_over_opening_towers():
    result = diagonal(TowerEnumeration(), 5)
    assert result.source_digits == (0, 0, 0, 0, 3)
    assert result.output_digits == (5, 5, 5, 5, 5)
    assert result.positions == (1, 2, 3, 4, 5)
    assert result.output_prefix() == "0.55555"


def test_diagonal_reads_values_mod_one():
    # element 1 is (1/1): fractional part 0, first digit 0 -> output 5
    result = diagonal(TowerEnumeration(), 1)
    assert result.elements[0].diag_digit == 0
    assert result.elements[0].out_digit == 5


def test_diagonal_rejects_fixed_point_rules():
    with pytest.raises(ValueError):
        diagonal(TowerEnumeration(), 3, digit_rule=lambda d: d)
    with pytest.raises(ValueError):
        diagonal(TowerEnumeration(), 3, digit_rule=lambda d: 10)
    with pytest.raises(ValueError):
        diagonal(TowerEnumeration(), 3, digit_rule=lambda d: 5 if d != 5 else 5)


def test_diagonal_needs_enough_elements(tmp_path):
    path = tmp_path / "seq.txt"
    path.write_text("0.5\n0.25\n")
    with pytest.raises(ValueError):
        diagonal(FileStream(path), 3)


def test_diagonal_empty_prefix_is_allowed():
    result = diagonal(TowerEnumeration(), 0)
    assert result.elements == ()
    assert result.output_prefix() == "0."


def test_diagonal_output_differs_from_each_element():
    result = diagonal(TowerEnumeration(), 12)
    for element in result.elements:
        assert element.out_digit != element.diag_digit
        assert element.position == element.index


def test_diagonal_records_schema():
    rows = diagonal_records(diagonal(Eq15Example(), 3))
    assert list(rows[0]) == ["nu", "element", "diag_digit", "out_digit", "position"]
    assert [r["element"] for r in rows] == ["4/2", "2/4", "6/4"]
    # mod 1 the values are 0.0, 0.5, 0.5; places 1, 2, 3 all read digit 0
    assert [r["diag_digit"] for r in rows] == [0, 0, 0]
    assert [r["out_digit"] for r in rows] == [5, 5, 5]


# --- difference profile ----------------------------------------------------------


def test_profile_series_is_exact_powers_of_ten():
    profile = diagonal_difference_profile(TowerEnumeration(), 8)
    for k, row in enumerate(profile.rows, 1):
        assert row.k == k
        assert row.series == F(1, 10**k)


def test_profile_lower_bounds_default_rule():
    profile = diagonal_difference_profile(TowerEnumeration(), 5)
    deltas = [row.delta for row in profile.rows]
    assert deltas == [5, 5, 5, 5, 2]
    lower = [row.lower for row in profile.rows]
    assert lower == [
        F(4, 9),
        F(2, 45),
        F(1, 225),
        F(1, 2250),
        F(13, 900000),
    ]
    # the default-rule allowance is exactly 5/9
    for row, delta in zip(profile.rows, deltas):
        assert row.lower == (delta - F(5, 9)) / 10**row.k


def test_profile_bounds_bracket_the_true_gap():
    source = TowerEnumeration()
    profile = diagonal_difference_profile(source, 6)
    result = diagonal(source, 40)  # long prefix pins the output value well
    prefix = F(
        int("".join(str(d) for d in result.output_digits)), 10 ** len(result.elements)
    )
    for row in profile.rows:
        item = source.get(row.position)
        if item.exact is None:
            continue
        frac = item.exact - (item.exact.numerator // item.exact.denominator)
        true_gap = abs(prefix - frac)
        # prefix truncation only adds 10^-40
        assert row.lower <= true_gap + F(1, 10**39)
        assert true_gap <= row.upper + F(1, 10**39)


def test_profile_unsound_rules_floor_at_zero():
    # rule image {0, 9} spreads the tail too wide for the naive bound
    rule = lambda d: 9 if d < 5 else 0
    profile = diagonal_difference_profile(TowerEnumeration(), 5, digit_rule=rule)
    assert all(row.lower == 0 for row in profile.rows)
    assert all(row.upper > 0 for row in profile.rows)


def test_profile_records_schema():
    rows = profile_records(diagonal_difference_profile(TowerEnumeration(), 5))
    assert list(rows[0]) == [
        "k",
        "position",
        "delta",
        "lower_bound",
        "upper_bound",
        "series",
    ]
    assert rows[0]["lower_bound"] == "4/9"
    assert rows[0]["series"] == "0.1"


def test_series_strings():
    assert [series_string(k) for k in range(1, 7)] == [
        "0.1",
        "0.01",
        "0.001",
        "0.0001",
        "1e-05",
        "1e-06",
    ]
    assert series_string(10) == "1e-10"
