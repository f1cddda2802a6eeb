"""Certified best-approximation probe over the enumerated stream.

Given a target real, scan every committed entry up to a weight bound and
report the entry whose certified distance to the target is smallest.  All
reported errors are upper bounds: distance between the target's oracle
midpoint and the candidate's midpoint, plus the candidate's enclosure
radius, plus the target's own half-width.  The true error never exceeds
the report, and ties go to the earlier enumeration index.

Targets are either named constants enclosed by interval arithmetic to 120
digits, or decimal literals.  A literal with a fractional part is read as
a rounded value, an interval of width 10**-places centered on the text; an
integer literal is exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .enumeration import Enumerator, SequenceEntry
from .evaluator import _mpf_to_fraction, digits_to_bits
from .expr import render

NAMED_TARGETS = ("e", "pi", "ln2", "sqrt2")

ORACLE_DIGITS = 120

_LITERAL_RE = re.compile(r"[0-9]+(?:\.([0-9]+))?")


@dataclass(frozen=True)
class TargetSpec:
    """A target as a certified enclosure [lo, hi]."""

    name: str
    lo: Fraction
    hi: Fraction

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def halfwidth(self) -> Fraction:
        return (self.hi - self.lo) / 2

    @classmethod
    def named(cls, name: str, digits: int = ORACLE_DIGITS) -> "TargetSpec":
        ctx = mpmath.ctx_iv.MPIntervalContext()
        ctx.prec = digits_to_bits(digits)
        if name == "e":
            iv = ctx.exp(ctx.mpf(1))
        elif name == "pi":
            iv = ctx.pi
        elif name == "ln2":
            iv = ctx.log(ctx.mpf(2))
        elif name == "sqrt2":
            iv = ctx.sqrt(ctx.mpf(2))
        else:
            raise ValueError(f"unknown named target {name!r}; have {NAMED_TARGETS}")
        lo_raw, hi_raw = iv._mpi_
        return cls(name, _mpf_to_fraction(lo_raw), _mpf_to_fraction(hi_raw))

    @classmethod
    def from_decimal(cls, text: str) -> "TargetSpec":
        text = text.strip()
        match = _LITERAL_RE.fullmatch(text)
        if not match:
            raise ValueError(f"not a decimal literal: {text!r}")
        value = Fraction(text)
        places = len(match.group(1) or "")
        if places == 0:
            return cls(text, value, value)
        half = Fraction(1, 2 * 10**places)
        return cls(text, value - half, value + half)

    @classmethod
    def of(cls, text: str) -> "TargetSpec":
        if text in NAMED_TARGETS:
            return cls.named(text)
        return cls.from_decimal(text)


def certified_error(target: TargetSpec, entry: SequenceEntry) -> Fraction:
    """Upper bound on |target - entry value|, exact rational arithmetic."""
    if entry.exact is not None:
        return abs(target.midpoint - entry.exact) + target.halfwidth
    ball = entry.ball
    return abs(target.midpoint - ball.midpoint) + ball.radius + target.halfwidth


def best_approx(
    target: TargetSpec,
    max_weight: int,
    enumerator: Optional[Enumerator] = None,
) -> tuple[SequenceEntry, Fraction]:
    """Exhaustive minimum of the certified error over weight <= max_weight.

    No pruning: every committed entry is scored.  Entries that exist only
    in symbolic power form carry no enclosure and are skipped; their
    magnitude satisfies |log10| > 2.4e6 in either direction, while any
    target this module accepts is a bounded named constant or a decimal
    literal, so the weight-2 entry (1/1) is already closer than they can
    ever be and the skip cannot change the minimum.
    """
    if max_weight < 2:
        raise ValueError("max_weight must be >= 2")
    enum = enumerator if enumerator is not None else Enumerator()
    best: Optional[tuple[SequenceEntry, Fraction]] = None
    for entry in enum.up_to_weight(max_weight):
        if entry.ball is None and entry.exact is None:
            continue
        error = certified_error(target, entry)
        if best is None or error < best[1]:
            best = (entry, error)
    assert best is not None  # weight 2 commits (1/1)
    return best


@dataclass(frozen=True)
class ProfileRow:
    weight: int
    entry: SequenceEntry
    error: Fraction


@dataclass(frozen=True)
class DensityProfile:
    target: TargetSpec
    rows: tuple[ProfileRow, ...]


def density_profile(
    target: TargetSpec,
    weights: list[int],
    enumerator: Optional[Enumerator] = None,
) -> DensityProfile:
    """best_approx at each bound; one shared stream keeps the scan cheap.

    Bounds must be ascending, so each row searches a superset of the one
    before it and the reported errors can only shrink or stay put.
    """
    if not weights:
        raise ValueError("need at least one weight bound")
    if any(w2 <= w1 for w1, w2 in zip(weights, weights[1:])):
        raise ValueError("weight bounds must be strictly ascending")
    enum = enumerator if enumerator is not None else Enumerator()
    rows = []
    for bound in weights:
        entry, error = best_approx(target, bound, enum)
        rows.append(ProfileRow(bound, entry, error))
    return DensityProfile(target, tuple(rows))


def error_string(error: Fraction) -> str:
    """Shortest decimal that does not under-report the certified error."""
    if error == 0:
        return "0.0"
    approx = float(error)
    if Fraction(approx) < error:
        approx = math.nextafter(approx, math.inf)
    return repr(approx)


def profile_records(profile: DensityProfile) -> list[dict]:
    return [
        {
            "weight": row.weight,
            "expr": render(row.entry.expr),
            "error_upper_bound": error_string(row.error),
        }
        for row in profile.rows
    ]
