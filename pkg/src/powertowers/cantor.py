"""Sequence-driven interval and digit harnesses.

Two classical constructions run here over pluggable indexed sources.  The
first refines an interval by repeatedly picking the first two source
elements strictly inside it (the lower one becomes the new left endpoint).
The second walks the digit array of the listed elements and assembles a
number whose decimal at position v is forced to differ from element v's
decimal at that same position.

Sources are total, deterministic and 1-based.  A source element carries a
display label plus an evaluable value: a proven-rational Fraction when one
is available, otherwise the expression itself, which downstream code
compares and digit-extracts through the evaluator's certified routines.
The harness asserts nothing about what either construction "proves"; it
records the intervals, indices, digits and error bounds, and leaves the
reading to the caller.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Callable, Optional

import mpmath

from .enumeration import Enumerator
from .evaluator import (
    DEFAULT_CAP_DIGITS,
    DEFAULT_START_DIGITS,
    Comparison,
    DigitUndecidable,
    PrecisionCapExceeded,
    compare_values,
    decimal_digits,
    digits_to_bits,
    eval_interval,
)
from .expr import Atom, ParseError, Rational, Tower, parse, render
from .values import BigPow, classify, exact_rational

TERMINATION_DEPTH = "depth reached"
TERMINATION_BUDGET = "budget exhausted"

DEFAULT_SCAN_BUDGET = 10_000

_DECIMAL_RE = re.compile(r"[0-9]+(?:\.[0-9]+)?")


class BudgetExhausted(RuntimeError):
    """Fewer than two in-interval elements before the scan budget ran out.

    Carries the partial trace; for a finite source this is the case where
    the remaining stream simply has at most one element in the interval.
    """

    def __init__(self, message: str, level: int, found: int, trace: "NestedTrace"):
        super().__init__(message)
        self.level = level
        self.found = found
        self.trace = trace


# -- sources -----------------------------------------------------------------


@dataclass(frozen=True)
class SourceItem:
    """One stream element: 1-based index, display label, evaluable value."""

    index: int
    label: str
    expr: Optional[Tower]
    exact: Optional[Fraction]

    @property
    def value(self) -> Fraction | Tower:
        return self.exact if self.exact is not None else self.expr


class SequenceSource:
    """Deterministic 1-based indexed stream.

    get(i) returns the i-th item, or None once a finite stream is past its
    end.  Identical construction arguments must give identical streams.
    """

    name = "source"

    def get(self, index: int) -> Optional[SourceItem]:
        raise NotImplementedError


class TowerEnumeration(SequenceSource):
    """The deduplicated tower stream, in enumeration order."""

    name = "towers"

    def __init__(self):
        self._enum = Enumerator()
        self._items: list[SourceItem] = []

    def get(self, index: int) -> Optional[SourceItem]:
        if index < 1:
            raise ValueError("index must be >= 1")
        while len(self._items) < index:
            entry = self._enum.next()
            self._items.append(
                SourceItem(entry.index, render(entry.expr), entry.expr, entry.exact)
            )
        return self._items[index - 1]


class RationalsCalkinWilf(SequenceSource):
    """Every positive rational exactly once: 1/1, 1/2, 2/1, 1/3, 3/2, ...

    Successor rule: x -> 1/(2*floor(x) - x + 1).
    """

    name = "rationals"

    def __init__(self):
        self._values: list[Fraction] = [Fraction(1)]

    def get(self, index: int) -> Optional[SourceItem]:
        if index < 1:
            raise ValueError("index must be >= 1")
        values = self._values
        while len(values) < index:
            x = values[-1]
            values.append(1 / (2 * (x.numerator // x.denominator) - x + 1))
        q = values[index - 1]
        return SourceItem(index, f"{q.numerator}/{q.denominator}", None, q)


class Eq15Example(SequenceSource):
    """Alternating rationals closing on 1 from above and below.

    Index 2k+1 carries (4+2k)/(2+2k) and index 2k+2 carries (2+2k)/(4+2k),
    so the stream opens 4/2, 2/4, 6/4, 4/6, 8/6, 6/8, ...  Refining (0, 2)
    over this stream picks the chain 2/4 < 4/6 < 6/8 < ... < 8/6 < 6/4:
    the opening 4/2 is never picked (it is not strictly inside), and the
    level-n pair comes out as ((2+2n)/(4+2n), (6+2n)/(4+2n)), both
    endpoints at exact distance 1/(n+2) from 1.
    """

    name = "eq15"

    def get(self, index: int) -> Optional[SourceItem]:
        if index < 1:
            raise ValueError("index must be >= 1")
        k, upper = divmod(index - 1, 2)
        num, den = (4 + 2 * k, 2 + 2 * k) if upper == 0 else (2 + 2 * k, 4 + 2 * k)
        return SourceItem(index, f"{num}/{den}", None, Fraction(num, den))


class FileStream(SequenceSource):
    """Finite stream read from a file.

    One canonical grammar expression or one unsigned decimal literal per
    line; blank lines are skipped.  Anything else is rejected with the
    offending line number.
    """

    name = "file"

    def __init__(self, path):
        self.path = str(path)
        self._items: list[SourceItem] = []
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, 1):
                text = raw.strip()
                if not text:
                    continue
                index = len(self._items) + 1
                try:
                    expr = parse(text)
                    item = SourceItem(index, render(expr), expr, exact_rational(expr))
                except ParseError:
                    if not _DECIMAL_RE.fullmatch(text):
                        raise ValueError(
                            f"{self.path}:{line_no}: neither a canonical expression "
                            f"nor a decimal literal: {text!r}"
                        ) from None
                    item = SourceItem(index, text, None, Fraction(text))
                self._items.append(item)

    def get(self, index: int) -> Optional[SourceItem]:
        if index < 1:
            raise ValueError("index must be >= 1")
        if index > len(self._items):
            return None
        return self._items[index - 1]


def eq15_sequence(n: int) -> tuple[Rational, Rational]:
    """Closed-form reciprocal pair ((2+2n)/(4+2n), (4+2n)/(2+2n)), n >= 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return Rational(2 + 2 * n, 4 + 2 * n), Rational(4 + 2 * n, 2 + 2 * n)


# -- ordering helpers --------------------------------------------------------


def _as_fraction(x) -> Fraction:
    if isinstance(x, Rational):
        return x.as_fraction()
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot use {x!r} as an interval endpoint")


def _lift(q: Fraction) -> Tower:
    # positive rationals only; callers handle q <= 0 before lifting
    return Tower((Atom(Rational(q.numerator, q.denominator)),))


def _cmp(a: Fraction | Tower, b: Fraction | Tower, cap_digits: int) -> int:
    """Sign of a - b; equality is only ever reported with a certificate."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a > b) - (a < b)
    if isinstance(a, Fraction) and a <= 0:
        return -1  # tower values are positive
    if isinstance(b, Fraction) and b <= 0:
        return 1
    ta = a if isinstance(a, Tower) else _lift(a)
    tb = b if isinstance(b, Tower) else _lift(b)
    order = compare_values(ta, tb, cap_digits=cap_digits)
    if order is Comparison.LESS:
        return -1
    if order is Comparison.GREATER:
        return 1
    if order is Comparison.EQUAL_EXACT:
        return 0
    raise PrecisionCapExceeded(
        f"cannot order {render(ta)} and {render(tb)} within {cap_digits} digits"
    )


def index_of_value(
    source: SequenceSource,
    value,
    scan_budget: int = DEFAULT_SCAN_BUDGET,
    cap_digits: int = DEFAULT_CAP_DIGITS,
) -> Optional[int]:
    """First index whose value equals the given one; None if not found.

    The scan stops at the budget or at the end of a finite stream; equality
    comes from _cmp, so it is certified, never heuristic.
    """
    target = value if isinstance(value, Tower) else _as_fraction(value)
    for index in range(1, scan_budget + 1):
        item = source.get(index)
        if item is None:
            return None
        if _cmp(item.value, target, cap_digits) == 0:
            return index
    return None


# -- nested interval refinement ----------------------------------------------


@dataclass(frozen=True)
class NestedLevel:
    """One refinement step: the first two in-interval elements, ordered."""

    level: int  # 0-based; the eq15 stream makes level n the 1 +- 1/(n+2) pair
    alpha: SourceItem
    beta: SourceItem
    scanned: int  # highest stream index examined for this step


@dataclass(frozen=True)
class NestedTrace:
    source: str
    a: Fraction
    b: Fraction
    depth: int
    levels: tuple[NestedLevel, ...]
    termination: str


def nested_intervals(
    source: SequenceSource,
    a,
    b,
    depth: int,
    scan_budget: int = DEFAULT_SCAN_BUDGET,
    cap_digits: int = DEFAULT_CAP_DIGITS,
) -> NestedTrace:
    """Refine (a, b) depth times through the source's first two in-interval
    elements, assigning the lower value to the left endpoint each time.

    Every step conceptually rescans from index 1, and the budget caps the
    highest index a step may examine.  The cursor still only moves forward:
    a value strictly inside the child interval is strictly inside the
    parent, so its index must exceed the parent's second pick (an earlier
    index would itself have been picked, or carries an endpoint value).
    A repeated value counts once, at its first index, which keeps the
    nesting strict for streams that are not value-deduplicated.
    """
    a = _as_fraction(a)
    b = _as_fraction(b)
    if not a < b:
        raise ValueError("need a < b")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if scan_budget < 2:
        raise ValueError("scan budget must admit at least two elements")
    lo: Fraction | Tower = a
    hi: Fraction | Tower = b
    levels: list[NestedLevel] = []
    cursor = 1
    for level in range(depth):
        first: Optional[SourceItem] = None
        second: Optional[SourceItem] = None
        index = cursor
        while index <= scan_budget:
            item = source.get(index)
            if item is None:
                break
            value = item.value
            if _cmp(value, lo, cap_digits) > 0 and _cmp(value, hi, cap_digits) < 0:
                if first is None:
                    first = item
                elif _cmp(value, first.value, cap_digits) != 0:
                    second = item
                    break
            index += 1
        if second is None:
            found = 0 if first is None else 1
            partial = NestedTrace(
                source.name, a, b, depth, tuple(levels), TERMINATION_BUDGET
            )
            raise BudgetExhausted(
                f"step {level}: found {found} element(s) strictly inside "
                f"the interval by index {min(index, scan_budget)}",
                level=level,
                found=found,
                trace=partial,
            )
        if _cmp(first.value, second.value, cap_digits) < 0:
            alpha, beta = first, second
        else:
            alpha, beta = second, first
        levels.append(NestedLevel(level, alpha, beta, second.index))
        lo, hi = alpha.value, beta.value
        cursor = second.index + 1
    return NestedTrace(source.name, a, b, depth, tuple(levels), TERMINATION_DEPTH)


# -- diagonal construction ---------------------------------------------------


def default_digit_rule(d: int) -> int:
    """5 unless the source digit is 5, then 4; avoids 0/9 expansion traps."""
    return 5 if d != 5 else 4


def _check_rule(digit_rule: Callable[[int], int]) -> tuple[int, ...]:
    image = []
    for d in range(10):
        r = digit_rule(d)
        if not isinstance(r, int) or not 0 <= r <= 9:
            raise ValueError(f"digit rule must map 0..9 into 0..9, got {d} -> {r!r}")
        if r == d:
            raise ValueError(f"digit rule must move every digit, but fixes {d}")
        image.append(r)
    return tuple(image)


def _fractional_digit(
    item: SourceItem, position: int, cap_digits: int, start_digits: int
) -> int:
    """Decimal digit of the item's value mod 1 at the given place (>= 1)."""
    if item.exact is not None:
        q = item.exact
        fpart = q - floor(q)
        return (fpart.numerator * 10**position // fpart.denominator) % 10
    try:
        digits, _ = decimal_digits(item.expr, position, cap_digits, start_digits)
    except DigitUndecidable as err:
        wrapped = DigitUndecidable(f"element {item.index} ({item.label}): {err}")
        wrapped.source_index = item.index
        raise wrapped from err
    return int(digits[-1])


@dataclass(frozen=True)
class DiagonalElement:
    index: int
    label: str
    diag_digit: int  # the element's own decimal at place index
    out_digit: int  # the assembled number's decimal at that place
    position: int  # the place where disagreement is pinned (= index)


@dataclass(frozen=True)
class DiagonalResult:
    n: int
    elements: tuple[DiagonalElement, ...]

    @property
    def source_digits(self) -> tuple[int, ...]:
        return tuple(e.diag_digit for e in self.elements)

    @property
    def output_digits(self) -> tuple[int, ...]:
        return tuple(e.out_digit for e in self.elements)

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(e.position for e in self.elements)

    def output_prefix(self) -> str:
        """The assembled digits as a decimal string, "0.d1d2...dn"."""
        return "0." + "".join(str(d) for d in self.output_digits)


def diagonal(
    source: SequenceSource,
    n: int,
    digit_rule: Callable[[int], int] = default_digit_rule,
    cap_digits: int = DEFAULT_CAP_DIGITS,
    start_digits: int = DEFAULT_START_DIGITS,
) -> DiagonalResult:
    """Digit-array walk over elements 1..n, values taken mod 1.

    Element v contributes its decimal at place v; the rule turns that into
    the output decimal at place v, so the assembled number provably differs
    from element v at place v.  The rule must move every digit (checked up
    front).  Digits come from certified enclosures; a digit that stays
    undecided at the precision cap propagates as DigitUndecidable carrying
    the offending element index.
    """
    _check_rule(digit_rule)
    if n < 0:
        raise ValueError("n must be >= 0")
    elements = []
    for v in range(1, n + 1):
        item = source.get(v)
        if item is None:
            raise ValueError(f"source {source.name} ends before element {v}")
        a = _fractional_digit(item, v, cap_digits, start_digits)
        elements.append(DiagonalElement(v, item.label, a, digit_rule(a), v))
    return DiagonalResult(n, tuple(elements))


# -- difference profile --------------------------------------------------------


@dataclass(frozen=True)
class DifferenceRow:
    k: int
    position: int  # certified disagreement place (the diagonal one)
    delta: int  # |out digit - source digit| at that place
    lower: Fraction  # certified lower bound on |assembled - element k| mod 1
    upper: Fraction  # certified upper bound, same normalization
    series: Fraction  # exact 10**-k


@dataclass(frozen=True)
class DifferenceProfile:
    n: int
    rule_image: tuple[int, int]  # (min, max) output digit of the rule
    rows: tuple[DifferenceRow, ...]


def series_string(k: int) -> str:
    """Exact decimal string for 10**-k: 0.1, 0.01, ..., then 1e-05 style."""
    if k <= 4:
        return "0." + "0" * (k - 1) + "1"
    return f"1e-{k:02d}"


def diagonal_difference_profile(
    source: SequenceSource,
    n: int,
    digit_rule: Callable[[int], int] = default_digit_rule,
    cap_digits: int = DEFAULT_CAP_DIGITS,
    start_digits: int = DEFAULT_START_DIGITS,
) -> DifferenceProfile:
    """Per-element separation bounds implied by the place-k disagreement.

    Both numbers are read mod 1.  The assembled number's digits all lie in
    the rule's image, so its tail beyond any known place sits in the window
    [min_image/9, max_image/9]; the element's tail is only known to sit in
    [0, 1].  With delta the digit gap at place k and A the worst tail
    spread, max(max_image/9, 1 - min_image/9), that gives

        |assembled - element_k| >= (delta - A) * 10**-k

    For this to hold without looking at earlier places, a disagreement at
    some place p < k must already force a larger distance; that is the
    condition (1 - A)*10 >= delta_max - A, which the default rule meets
    with equality.  Rules that fail it get a floor of zero instead of an
    unsound claim.  The upper bound confines the element only by its known
    place-k digit, so it stays coarse by design: the profile reports what
    the single-digit disagreement alone guarantees.
    """
    result = diagonal(source, n, digit_rule, cap_digits, start_digits)
    image = _check_rule(digit_rule)
    img_lo, img_hi = min(image), max(image)
    tail_lo, tail_hi = Fraction(img_lo, 9), Fraction(img_hi, 9)
    allowance = max(tail_hi, 1 - tail_lo)
    delta_max = max(abs(r - d) for d, r in enumerate(image))
    sound = (1 - allowance) * 10 >= delta_max - allowance
    rows = []
    prefix = Fraction(0)
    for element in result.elements:
        k = element.index
        prefix += Fraction(element.out_digit, 10**k)
        delta = abs(element.out_digit - element.diag_digit)
        scale = Fraction(1, 10**k)
        lower = (delta - allowance) * scale if sound else Fraction(0)
        lower = max(lower, Fraction(0))
        # assembled number enclosure from its first k digits plus tail window
        b_lo = prefix + tail_lo * scale
        b_hi = prefix + tail_hi * scale
        # element enclosure from its place-k digit alone
        x_lo = element.diag_digit * scale
        x_hi = 1 - (9 - element.diag_digit) * scale
        upper = max(b_hi - x_lo, x_hi - b_lo, Fraction(0))
        rows.append(DifferenceRow(k, element.position, delta, lower, upper, scale))
    return DifferenceProfile(n, (img_lo, img_hi), tuple(rows))


# -- record emission -----------------------------------------------------------


def _value_decimal(item: SourceItem, digits: int = 20) -> str:
    if item.exact is not None:
        q = item.exact
        with mpmath.workdps(digits + 10):
            return mpmath.nstr(
                mpmath.mpf(q.numerator) / mpmath.mpf(q.denominator), digits
            )
    nf = classify(item.expr)
    if isinstance(nf, BigPow):
        with mpmath.workdps(2 * digits):
            base = mpmath.mpf(nf.k.numerator) / mpmath.mpf(nf.k.denominator)
            return mpmath.nstr(mpmath.power(base, nf.m), digits)
    lo, hi = eval_interval(item.expr, digits_to_bits(digits + 10))
    mid = (lo + hi) / 2
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(
            mpmath.mpf(mid.numerator) / mpmath.mpf(mid.denominator), digits
        )


def nested_records(trace: NestedTrace) -> list[dict]:
    """One dict per level, JSONL/CSV ready; endpoints verbatim plus decimals."""
    return [
        {
            "level": lv.level,
            "alpha_index": lv.alpha.index,
            "alpha": lv.alpha.label,
            "beta_index": lv.beta.index,
            "beta": lv.beta.label,
            "alpha_value": _value_decimal(lv.alpha),
            "beta_value": _value_decimal(lv.beta),
            "scanned": lv.scanned,
        }
        for lv in trace.levels
    ]


def diagonal_records(result: DiagonalResult) -> list[dict]:
    return [
        {
            "nu": e.index,
            "element": e.label,
            "diag_digit": e.diag_digit,
            "out_digit": e.out_digit,
            "position": e.position,
        }
        for e in result.elements
    ]


def profile_records(profile: DifferenceProfile) -> list[dict]:
    """Bounds stay exact fraction strings so nothing is overstated."""
    return [
        {
            "k": row.k,
            "position": row.position,
            "delta": row.delta,
            "lower_bound": f"{row.lower.numerator}/{row.lower.denominator}",
            "upper_bound": f"{row.upper.numerator}/{row.upper.denominator}",
            "series": series_string(row.k),
        }
        for row in profile.rows
    ]
