"""Rigorous numeric evaluation of towers.

Values are evaluated with mpmath's interval arithmetic (outward rounding at
every step), recursively as x^y = exp(y*ln x) over the right-associated
chain.  Results are returned as `RealBall`s whose endpoints are *exact*
dyadic rationals, so all downstream comparisons are exact integer
arithmetic.  Working precision escalates by doubling until the requested
radius is certified or the configured digit cap is exceeded.

Proven-rational values (see `values.classify`) take an exact path and never
suffer precision-cap failures.  Terminating decimals use the "...d000..."
convention: digit extraction truncates, it never borrows into "...(d-1)999".
"""

from __future__ import annotations

import enum
from fractions import Fraction
from math import floor

import mpmath

from .expr import Atom, Tower
from .values import BigPow, Exact, classify, exact_rational

__all__ = [
    "Comparison",
    "DigitUndecidable",
    "PrecisionCapExceeded",
    "RealBall",
    "compare_values",
    "decimal_digits",
    "eval_ball",
    "eval_interval",
    "exact_rational",
]

DEFAULT_START_DIGITS = 64
DEFAULT_CAP_DIGITS = 4096

_BITS_PER_DIGIT = 3.3219280948873626

# dyadic endpoints are capped at 2^(+-2^23); values outside (the k**M
# magnitude tier, see values.BigPow) are compared through log2 instead
_MAX_DYADIC_EXP = 1 << 23


class PrecisionCapExceeded(ArithmeticError):
    """The requested radius could not be certified within the digit cap."""


class DigitUndecidable(ArithmeticError):
    """A decimal digit stayed ambiguous at the precision cap."""


def digits_to_bits(digits: int) -> int:
    return int(digits * _BITS_PER_DIGIT) + 16


def _mpf_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    if man == 0:
        if exp == 0:
            return Fraction(0)
        raise ArithmeticError("non-finite interval endpoint")
    if abs(exp) > _MAX_DYADIC_EXP:
        raise OverflowError(
            "value magnitude is beyond the dyadic endpoint range "
            f"(binary exponent ~2^{abs(exp).bit_length() - 1})"
        )
    value = Fraction(int(man)) * Fraction(2) ** exp
    return -value if sign else value


class RealBall:
    """Enclosure [lo, hi] of a real value, endpoints exact dyadic rationals."""

    __slots__ = ("lo", "hi", "prec_bits")

    def __init__(self, lo: Fraction, hi: Fraction, prec_bits: int = 0):
        assert lo <= hi
        self.lo = lo
        self.hi = hi
        self.prec_bits = prec_bits

    @classmethod
    def from_fraction(cls, q: Fraction) -> "RealBall":
        return cls(q, q)

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def contains(self, q: Fraction) -> bool:
        return self.lo <= q <= self.hi

    def encloses(self, other: "RealBall") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def disjoint(self, other: "RealBall") -> bool:
        return self.hi < other.lo or other.hi < self.lo

    def __repr__(self) -> str:
        mid = mpmath.mpf(self.midpoint.numerator) / self.midpoint.denominator
        rad = mpmath.mpf(self.radius.numerator) / max(self.radius.denominator, 1)
        return f"RealBall(mid~{mpmath.nstr(mid, 12)}, rad~{mpmath.nstr(rad, 3)})"


def _eval_atom(ctx, atom: Atom):
    value = ctx.mpf(atom.base.num) / ctx.mpf(atom.base.den)
    if atom.mid is None:
        return value
    exponent = ctx.mpf(atom.mid.num) / ctx.mpf(atom.mid.den)
    if atom.top is not None:
        exponent = exponent ** (ctx.mpf(atom.top.num) / ctx.mpf(atom.top.den))
    return value ** exponent


def eval_interval(expr: Tower | Fraction, prec_bits: int) -> tuple[Fraction, Fraction]:
    """One evaluation pass at fixed binary precision; exact endpoints."""
    if isinstance(expr, Fraction):
        return expr, expr
    ctx = mpmath.ctx_iv.MPIntervalContext()
    ctx.prec = prec_bits
    value = _eval_atom(ctx, expr.atoms[-1])
    for atom in reversed(expr.atoms[:-1]):
        value = _eval_atom(ctx, atom) ** value
    lo_raw, hi_raw = value._mpi_
    return _mpf_to_fraction(lo_raw), _mpf_to_fraction(hi_raw)


def _as_tolerance(abs_err) -> Fraction:
    tol = Fraction(abs_err) if not isinstance(abs_err, Fraction) else abs_err
    if tol <= 0:
        raise ValueError("abs_err must be positive")
    return tol


def eval_ball(
    expr: Tower,
    abs_err,
    cap_digits: int = DEFAULT_CAP_DIGITS,
    start_digits: int = DEFAULT_START_DIGITS,
) -> RealBall:
    """Enclose the value of expr with radius <= abs_err."""
    tol = _as_tolerance(abs_err)
    exact = exact_rational(expr)
    if exact is not None:
        return RealBall.from_fraction(exact)
    digits = start_digits
    while True:
        bits = digits_to_bits(digits)
        lo, hi = eval_interval(expr, bits)
        if (hi - lo) <= 2 * tol:
            return RealBall(lo, hi, bits)
        if digits >= cap_digits:
            raise PrecisionCapExceeded(
                f"cannot certify radius {float(tol):.3g} for {expr} within {cap_digits} digits"
            )
        digits = min(digits * 2, cap_digits)


class Comparison(enum.Enum):
    LESS = "Less"
    GREATER = "Greater"
    EQUAL_EXACT = "EqualExact"
    INDISTINGUISHABLE = "Indistinguishable"


def compare_values(
    e1: Tower,
    e2: Tower,
    cap_digits: int = DEFAULT_CAP_DIGITS,
    start_digits: int = DEFAULT_START_DIGITS,
) -> Comparison:
    """Ordered comparison by value.

    EqualExact arises from structural identity, from exact rationals on both
    sides, or from matching irrational normal forms (a sound certificate:
    normal forms are built by value-preserving identities).  Less/Greater
    come from disjoint enclosures; Indistinguishable is returned only when
    the precision cap is reached without separation.
    """
    if e1 == e2:
        return Comparison.EQUAL_EXACT
    n1, n2 = classify(e1), classify(e2)
    if isinstance(n1, Exact) and isinstance(n2, Exact):
        if n1.q == n2.q:
            return Comparison.EQUAL_EXACT
        return Comparison.LESS if n1.q < n2.q else Comparison.GREATER
    if n1 is not None and n1 == n2:
        return Comparison.EQUAL_EXACT
    if isinstance(n1, BigPow) or isinstance(n2, BigPow):
        return _compare_magnitudes(e1, n1, e2, n2, cap_digits, start_digits)
    v1 = n1.q if isinstance(n1, Exact) else e1
    v2 = n2.q if isinstance(n2, Exact) else e2
    digits = start_digits
    while True:
        bits = digits_to_bits(digits)
        lo1, hi1 = eval_interval(v1, bits)
        lo2, hi2 = eval_interval(v2, bits)
        if hi1 < lo2:
            return Comparison.LESS
        if hi2 < lo1:
            return Comparison.GREATER
        if digits >= cap_digits:
            return Comparison.INDISTINGUISHABLE
        digits = min(digits * 2, cap_digits)


def _log2_iv(q: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Exact rational enclosure of log2(q) for q > 0."""
    assert q > 0
    ctx = mpmath.ctx_iv.MPIntervalContext()
    ctx.prec = bits
    x = ctx.mpf(q.numerator) / ctx.mpf(q.denominator)
    value = ctx.log(x) / ctx.log(2)
    lo_raw, hi_raw = value._mpi_
    return _mpf_to_fraction(lo_raw), _mpf_to_fraction(hi_raw)


def _log2_bounds(nf, expr: Tower, bits: int) -> tuple[Fraction, Fraction]:
    if isinstance(nf, BigPow):
        lo, hi = _log2_iv(nf.k, bits)
        return (lo * nf.m, hi * nf.m) if nf.m >= 0 else (hi * nf.m, lo * nf.m)
    if isinstance(nf, Exact):
        return _log2_iv(nf.q, bits)
    lo, hi = eval_interval(expr, bits)
    return _log2_iv(lo, bits)[0], _log2_iv(hi, bits)[1]


def _compare_magnitudes(e1, n1, e2, n2, cap_digits, start_digits) -> Comparison:
    """Comparison through log2 when a side has no dyadic representation.

    Equality is off the table here: the callers ruled out matching normal
    forms, and BigPow forms are value-canonical.
    """
    if isinstance(n1, BigPow) and isinstance(n2, BigPow) and n1.k == n2.k:
        return Comparison.LESS if n1.m < n2.m else Comparison.GREATER
    digits = start_digits
    while True:
        bits = digits_to_bits(digits)
        lo1, hi1 = _log2_bounds(n1, e1, bits)
        lo2, hi2 = _log2_bounds(n2, e2, bits)
        if hi1 < lo2:
            return Comparison.LESS
        if hi2 < lo1:
            return Comparison.GREATER
        if digits >= cap_digits:
            return Comparison.INDISTINGUISHABLE
        digits = min(digits * 2, cap_digits)


def decimal_digits(
    expr: Tower,
    k: int,
    cap_digits: int = DEFAULT_CAP_DIGITS,
    start_digits: int = DEFAULT_START_DIGITS,
) -> tuple[str, bool]:
    """First k decimal digits after the point of the value's fractional part.

    Returns (digit string, exact flag); exact means the value is a proven
    rational, so every further digit is determined.  Irrational values are
    refined until the k digits are stable; a decimal boundary that survives
    to the precision cap raises DigitUndecidable.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scale = 10 ** k
    exact = exact_rational(expr)
    if exact is not None:
        fpart = exact - floor(exact)
        digits = (fpart.numerator * scale) // fpart.denominator
        return str(digits).zfill(k), True
    digits_prec = max(start_digits, k + 8)
    while True:
        bits = digits_to_bits(digits_prec)
        lo, hi = eval_interval(expr, bits)
        m_lo, m_hi = floor(lo * scale), floor(hi * scale)
        if m_lo == m_hi:
            return str(m_lo % scale).zfill(k), False
        if digits_prec >= cap_digits:
            raise DigitUndecidable(
                f"digit {k} of {expr} undecided at cap {cap_digits} digits"
            )
        digits_prec = min(digits_prec * 2, cap_digits)
