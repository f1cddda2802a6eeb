"""Weight-ordered enumeration of towers with value-based deduplication.

The stream visits weight blocks in increasing order; inside a block the
candidates appear in `expr.tower_sort_key` order.  A candidate is committed
only if its value differs from every previously committed entry ("anywhere
earlier in commit order").  Equality is certified symbolically, by matching
value normal forms from `values.classify`; inequality is certified by
disjoint interval enclosures, escalating from `start_digits` to
`cap_digits` significant digits.  Rational-valued candidates are therefore
decided by an exact lookup and never by intervals; rationals too large to
materialize stay in symbolic power form and join the same exact lookup,
with no enclosure at all.

A pair that reaches the cap with neither certificate is handled by policy:
"flag" (default) commits the candidate and records a `FlagEvent`, keeping
the stream deterministic and the suspect pair auditable; "error" raises
`PrecisionCapExceeded`.

Checkpoints serialize the cursor plus the committed ledger; loading replays
the ledger deterministically, so the resumed stream is identical to an
uninterrupted run.
"""

from __future__ import annotations

import itertools
import json
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import mpmath

from .evaluator import (
    DEFAULT_CAP_DIGITS,
    DEFAULT_START_DIGITS,
    PrecisionCapExceeded,
    RealBall,
    _MAX_DYADIC_EXP,
    _log2_iv,
    digits_to_bits,
    eval_interval,
)
from .expr import Atom, ParseError, Rational, Tower, parse, render
from .values import BigPow, Exact, ValueNF, classify

__all__ = [
    "CheckpointError",
    "DedupLedger",
    "Enumerator",
    "FlagEvent",
    "PrefixReport",
    "SequenceEntry",
    "atoms_of_weight",
    "entry_record",
    "fractions_of_weight",
    "generate_weight_block",
]

CHECKPOINT_FORMAT = "powertowers-checkpoint"
CHECKPOINT_VERSION = 1


class CheckpointError(Exception):
    """Checkpoint file is missing, corrupt, or from an unknown version."""


# --- candidate generation ------------------------------------------------


@lru_cache(maxsize=None)
def fractions_of_weight(w: int) -> tuple[Rational, ...]:
    """All fractions with num+den == w, denominator ascending, unreduced."""
    return tuple(Rational(w - d, d) for d in range(1, w))


@lru_cache(maxsize=None)
def atoms_of_weight(w: int) -> tuple[Atom, ...]:
    """All atoms of exactly this weight, in atom_sort_key order."""
    out = [Atom(f) for f in fractions_of_weight(w)]
    for wm in range(2, w - 1):
        for mid in fractions_of_weight(wm):
            for base in fractions_of_weight(w - wm):
                out.append(Atom(base, mid))
    for wt in range(2, w - 3):
        for top in fractions_of_weight(wt):
            for wm in range(2, w - wt - 1):
                for mid in fractions_of_weight(wm):
                    for base in fractions_of_weight(w - wt - wm):
                        out.append(Atom(base, mid, top))
    return tuple(out)


def _tails(length: int, budget: int) -> Iterator[tuple[int, ...]]:
    # weight compositions (w2..wk), parts >= 2, lexicographically ascending
    if length == 0:
        yield ()
        return
    for head in range(2, budget - 2 * (length - 1) + 1):
        for rest in _tails(length - 1, budget - head):
            yield (head,) + rest


def generate_weight_block(w: int) -> list[Tower]:
    """All structurally distinct towers of weight w, ordered, pre-dedup."""
    if w < 2:
        raise ValueError("weight must be >= 2")
    block: list[Tower] = []
    k = 1
    while 2 * k <= w:
        for tail in _tails(k - 1, w - 2):
            w1 = w - sum(tail)
            # pools top-down so the last atom varies slowest, a_1 fastest
            pools = [atoms_of_weight(wi) for wi in reversed((w1,) + tail)]
            for combo in itertools.product(*pools):
                block.append(Tower(combo[::-1]))
        k += 1
    return block


# --- stream entries and the dedup ledger ----------------------------------


@dataclass(frozen=True)
class SequenceEntry:
    """One committed element: 1-based index, expression, value snapshot.

    `ball` is None exactly when the value is a rational too large to
    materialize or enclose; such entries carry only their normal form.
    """

    index: int
    expr: Tower
    weight: int
    nf: Optional[ValueNF]
    ball: Optional[RealBall]
    prec_bits: int

    @property
    def exact(self) -> Optional[Fraction]:
        """The value as a reduced fraction, when small enough to hold."""
        return self.nf.q if isinstance(self.nf, Exact) else None

    @property
    def is_rational(self) -> bool:
        """True when the value is proven rational, materialized or not."""
        return isinstance(self.nf, (Exact, BigPow))

    @property
    def value_class(self):
        # the rational normal form for proven rationals, else the enclosure
        return self.nf if self.is_rational else self.ball


@dataclass(frozen=True)
class FlagEvent:
    """A committed candidate that the cap could not separate from a neighbor."""

    kind: str
    candidate: str
    candidate_index: int
    neighbor_index: int
    digits: int


@dataclass
class _Record:
    entry: SequenceEntry
    ball: Optional[RealBall]
    prec_bits: int
    nf: Optional[ValueNF]


class DedupLedger:
    """Committed values: exact lookup by normal form, intervals for the rest.

    Unflagged records hold pairwise disjoint enclosures, kept in ascending
    order; refinement only shrinks an enclosure, so the order never changes
    and overlap queries stay a contiguous bisect window.  Records committed
    under the flag policy may overlap something, so they sit in a small
    side list that is scanned linearly.  Ball-less records (rationals too
    large to enclose) live only in the normal-form index.
    """

    def __init__(self):
        self.records: list[_Record] = []
        self._nf_index: dict[ValueNF, int] = {}
        self._order: list[int] = []
        self._unordered: list[int] = []

    def lookup(self, nf: Optional[ValueNF]) -> Optional[int]:
        if nf is None:
            return None
        return self._nf_index.get(nf)

    def window(self, lo: Fraction, hi: Fraction) -> list[_Record]:
        """Records whose current enclosure meets [lo, hi]."""
        out = []
        i = bisect_left(self._order, lo, key=lambda p: self.records[p].ball.hi)
        while i < len(self._order):
            rec = self.records[self._order[i]]
            if rec.ball.lo > hi:
                break
            out.append(rec)
            i += 1
        for p in self._unordered:
            rec = self.records[p]
            if not (rec.ball.hi < lo or rec.ball.lo > hi):
                out.append(rec)
        return out

    def refine(self, rec: _Record, bits: int) -> None:
        if rec.ball is None or rec.entry.exact is not None or rec.prec_bits >= bits:
            return
        lo, hi = eval_interval(rec.entry.expr, bits)
        rec.ball = RealBall(lo, hi, bits)
        rec.prec_bits = bits

    def add(self, rec: _Record, flagged: bool) -> None:
        self.records.append(rec)
        pos = len(self.records) - 1
        if rec.nf is not None:
            self._nf_index[rec.nf] = rec.entry.index
        if rec.ball is None:
            return
        if flagged:
            self._unordered.append(pos)
        else:
            i = bisect_left(self._order, rec.ball.lo, key=lambda p: self.records[p].ball.lo)
            self._order.insert(i, pos)

    @property
    def exact_values(self) -> dict[Fraction, int]:
        """Reduced rational -> entry index, for every proven-rational entry."""
        return {
            nf.q: idx for nf, idx in self._nf_index.items() if isinstance(nf, Exact)
        }


def _log2_magnitude_floor(nf: BigPow) -> Fraction:
    """Certified lower bound on |log2| of a symbolic power's value."""
    lo, hi = _log2_iv(nf.k, 64)
    if lo > 0:
        per_unit = lo
    elif hi < 0:
        per_unit = -hi
    else:
        per_unit = Fraction(0)
    return per_unit * abs(nf.m)


# --- the enumerator --------------------------------------------------------


class Enumerator:
    """Stateful cursor over the deduplicated stream."""

    def __init__(
        self,
        *,
        start_digits: int = DEFAULT_START_DIGITS,
        cap_digits: int = DEFAULT_CAP_DIGITS,
        on_indistinguishable: str = "flag",
        max_weight: Optional[int] = None,
    ):
        if on_indistinguishable not in ("flag", "error"):
            raise ValueError("on_indistinguishable must be 'flag' or 'error'")
        if start_digits < 1 or cap_digits < start_digits:
            raise ValueError("need 1 <= start_digits <= cap_digits")
        self.start_digits = start_digits
        self.cap_digits = cap_digits
        self.on_indistinguishable = on_indistinguishable
        self.max_weight = max_weight
        self.ledger = DedupLedger()
        self.flags: list[FlagEvent] = []
        self._entries: list[SequenceEntry] = []
        self._weight = 2
        self._position = 0
        self._block: Optional[list[Tower]] = None
        self._generated = 0
        self._skipped = 0

    # -- public state ------------------------------------------------------

    @property
    def committed(self) -> tuple[SequenceEntry, ...]:
        return tuple(self._entries)

    @property
    def counters(self) -> dict[str, int]:
        return {
            "generated": self._generated,
            "committed": len(self._entries),
            "skipped_duplicate": self._skipped,
            "flagged_indistinguishable": len(self.flags),
        }

    @property
    def cursor(self) -> tuple[int, int]:
        """(current weight, candidates consumed within that block)."""
        return self._weight, self._position

    # -- streaming ---------------------------------------------------------

    def next(self, *, max_weight: Optional[int] = None) -> SequenceEntry:
        """Commit and return the next value-novel element.

        Raises StopIteration once the weight bound (the enumerator's own or
        the per-call one) is passed; the cursor is left at the start of the
        first out-of-bound block, so a later call with a higher bound
        resumes without loss.
        """
        while True:
            bound = self.max_weight
            if max_weight is not None:
                bound = max_weight if bound is None else min(bound, max_weight)
            if bound is not None and self._weight > bound:
                raise StopIteration
            if self._block is None:
                self._block = generate_weight_block(self._weight)
            if self._position >= len(self._block):
                self._weight += 1
                self._position = 0
                self._block = None
                continue
            candidate = self._block[self._position]
            self._position += 1
            entry = self._process(candidate)
            if entry is not None:
                return entry

    def stream(
        self,
        *,
        max_count: Optional[int] = None,
        max_weight: Optional[int] = None,
    ) -> Iterator[SequenceEntry]:
        produced = 0
        while max_count is None or produced < max_count:
            try:
                yield self.next(max_weight=max_weight)
            except StopIteration:
                return
            produced += 1

    def prefix(self, n: int) -> list[SequenceEntry]:
        """First n committed entries (extends the stream as needed)."""
        if n < 1:
            raise ValueError("n must be >= 1")
        while len(self._entries) < n:
            self.next()
        return self._entries[:n]

    def up_to_weight(self, w: int) -> list[SequenceEntry]:
        """All committed entries of weight <= w (consumes those blocks)."""
        while True:
            try:
                self.next(max_weight=w)
            except StopIteration:
                break
        return [e for e in self._entries if e.weight <= w]

    # -- dedup core ----------------------------------------------------------

    def _process(self, candidate: Tower) -> Optional[SequenceEntry]:
        self._generated += 1
        nf = classify(candidate)
        if self.ledger.lookup(nf) is not None:
            self._skipped += 1
            return None

        if isinstance(nf, BigPow):
            # no enclosure: safe only if the magnitude provably exceeds
            # anything an enclosure can represent, so no enclosed value
            # could share it
            if _log2_magnitude_floor(nf) <= _MAX_DYADIC_EXP:
                raise OverflowError(
                    f"{render(candidate)} falls between materializable "
                    f"rationals and enclosable magnitudes"
                )
            return self._commit(candidate, nf, None, 0, [])

        exact = nf.q if isinstance(nf, Exact) else None

        digits = self.start_digits
        if exact is not None:
            ball = RealBall.from_fraction(exact)
            bits = 0
        else:
            bits = digits_to_bits(digits)
            lo, hi = eval_interval(candidate, bits)
            ball = RealBall(lo, hi, bits)

        # escalate until the enclosure clears every committed neighbor
        stuck: list[_Record] = []
        while True:
            overlaps = self.ledger.window(ball.lo, ball.hi)
            if not overlaps:
                break
            if digits >= self.cap_digits:
                stuck = overlaps
                break
            digits = min(digits * 2, self.cap_digits)
            bits = digits_to_bits(digits)
            for rec in overlaps:
                self.ledger.refine(rec, bits)
            if exact is None:
                lo, hi = eval_interval(candidate, bits)
                ball = RealBall(lo, hi, bits)

        if stuck and self.on_indistinguishable == "error":
            raise PrecisionCapExceeded(
                f"{render(candidate)} not separated from "
                f"{render(stuck[0].entry.expr)} within {self.cap_digits} digits"
            )
        return self._commit(candidate, nf, ball, bits, stuck, digits)

    def _commit(
        self,
        candidate: Tower,
        nf: Optional[ValueNF],
        ball: Optional[RealBall],
        bits: int,
        stuck: list[_Record],
        digits: int = 0,
    ) -> SequenceEntry:
        index = len(self._entries) + 1
        entry = SequenceEntry(
            index=index,
            expr=candidate,
            weight=candidate.weight,
            nf=nf,
            ball=ball,
            prec_bits=bits,
        )
        self._entries.append(entry)
        self.ledger.add(_Record(entry=entry, ball=ball, prec_bits=bits, nf=nf), bool(stuck))
        for rec in stuck:
            self.flags.append(
                FlagEvent(
                    kind="indistinguishable",
                    candidate=render(candidate),
                    candidate_index=index,
                    neighbor_index=rec.entry.index,
                    digits=digits,
                )
            )
        return entry

    # -- prefix verification --------------------------------------------------

    def verify_prefix(self, reference: Sequence[str]) -> "PrefixReport":
        """Align the stream against a reference listing, element by element.

        A reference element that repeats the value of an earlier stream
        entry is reported as a skipped duplicate (with the witness index);
        a stream entry absent from the reference is reported as an
        insertion.  Anything else is a divergence.
        """
        if not reference:
            raise ValueError("reference must be nonempty")
        refset = set(reference)
        matched = 0
        insertions: list[tuple[int, str]] = []
        skipped: list[tuple[int, str, int]] = []
        first_divergence: Optional[int] = None
        i = 0  # position in reference
        j = 0  # position in stream (0-based)
        while i < len(reference):
            entry = self._entry_at(j)
            if entry is None:
                first_divergence = i + 1
                break
            text = render(entry.expr)
            if text == reference[i]:
                matched += 1
                i += 1
                j += 1
                continue
            witness = self._duplicate_witness(reference[i], j)
            if witness is not None:
                skipped.append((i + 1, reference[i], witness))
                i += 1
                continue
            if text not in refset:
                insertions.append((entry.index, text))
                j += 1
                continue
            first_divergence = i + 1
            break
        return PrefixReport(
            matched=matched,
            reference_total=len(reference),
            skipped_duplicates=skipped,
            insertions=insertions,
            first_divergence=first_divergence,
        )

    def _entry_at(self, j: int) -> Optional[SequenceEntry]:
        while len(self._entries) <= j:
            try:
                self.next()
            except StopIteration:
                return None
        return self._entries[j]

    def _duplicate_witness(self, text: str, j: int) -> Optional[int]:
        # is `text` value-equal to a stream entry at or before position j?
        try:
            expr = parse(text)
        except ParseError:
            return None
        idx = self.ledger.lookup(classify(expr))
        if idx is not None and idx <= j:
            return idx
        return None

    # -- checkpoints -----------------------------------------------------------

    def save_checkpoint(self, path) -> None:
        payload = {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "cursor": {"weight": self._weight, "position": self._position},
            "counters": {
                "generated": self._generated,
                "skipped_duplicate": self._skipped,
            },
            "config": {
                "start_digits": self.start_digits,
                "cap_digits": self.cap_digits,
                "on_indistinguishable": self.on_indistinguishable,
                "max_weight": self.max_weight,
            },
            "committed": [
                {"expr": render(rec.entry.expr), "prec_bits": rec.prec_bits}
                for rec in self.ledger.records
            ],
            "flags": [
                {
                    "kind": f.kind,
                    "candidate": f.candidate,
                    "candidate_index": f.candidate_index,
                    "neighbor_index": f.neighbor_index,
                    "digits": f.digits,
                }
                for f in self.flags
            ],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")

    @classmethod
    def load_checkpoint(cls, path) -> "Enumerator":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CheckpointError(f"unreadable checkpoint: {exc}") from exc
        try:
            if payload["format"] != CHECKPOINT_FORMAT:
                raise CheckpointError("not a checkpoint file")
            if payload["version"] != CHECKPOINT_VERSION:
                raise CheckpointError(
                    f"unsupported checkpoint version {payload['version']!r}"
                )
            config = payload["config"]
            enum = cls(
                start_digits=config["start_digits"],
                cap_digits=config["cap_digits"],
                on_indistinguishable=config["on_indistinguishable"],
                max_weight=config["max_weight"],
            )
            flagged_indexes = set()
            for item in payload["flags"]:
                enum.flags.append(
                    FlagEvent(
                        kind=item["kind"],
                        candidate=item["candidate"],
                        candidate_index=item["candidate_index"],
                        neighbor_index=item["neighbor_index"],
                        digits=item["digits"],
                    )
                )
                flagged_indexes.add(item["candidate_index"])
            for item in payload["committed"]:
                enum._replay(item["expr"], item["prec_bits"], flagged_indexes)
            cursor = payload["cursor"]
            enum._weight = cursor["weight"]
            enum._position = cursor["position"]
            enum._generated = payload["counters"]["generated"]
            enum._skipped = payload["counters"]["skipped_duplicate"]
        except (KeyError, TypeError, ValueError, ParseError) as exc:
            raise CheckpointError(f"corrupt checkpoint: {exc}") from exc
        if enum._weight < 2 or enum._position < 0:
            raise CheckpointError("corrupt checkpoint: bad cursor")
        if enum._generated != len(enum._entries) + enum._skipped:
            raise CheckpointError("corrupt checkpoint: inconsistent counters")
        block = generate_weight_block(enum._weight)
        if enum._position > len(block):
            raise CheckpointError("corrupt checkpoint: cursor past block end")
        enum._block = block
        return enum

    def _replay(self, text: str, prec_bits: int, flagged_indexes: set[int]) -> None:
        expr = parse(text)
        nf = classify(expr)
        if isinstance(nf, Exact):
            ball: Optional[RealBall] = RealBall.from_fraction(nf.q)
            bits = 0
        elif isinstance(nf, BigPow):
            ball = None
            bits = 0
        else:
            bits = int(prec_bits)
            if bits < 1:
                raise CheckpointError(f"corrupt checkpoint: bad precision for {text}")
            lo, hi = eval_interval(expr, bits)
            ball = RealBall(lo, hi, bits)
        index = len(self._entries) + 1
        entry = SequenceEntry(
            index=index,
            expr=expr,
            weight=expr.weight,
            nf=nf,
            ball=ball,
            prec_bits=bits,
        )
        self._entries.append(entry)
        self.ledger.add(
            _Record(entry=entry, ball=ball, prec_bits=bits, nf=nf),
            index in flagged_indexes,
        )


# --- reports and records ----------------------------------------------------


@dataclass(frozen=True)
class PrefixReport:
    """Outcome of verify_prefix: alignment of stream vs reference."""

    matched: int
    reference_total: int
    skipped_duplicates: list[tuple[int, str, int]]  # (ref position, expr, witness index)
    insertions: list[tuple[int, str]]  # (stream index, expr)
    first_divergence: Optional[int]  # 1-based reference position, None if aligned

    @property
    def reproducible_total(self) -> int:
        return self.reference_total - len(self.skipped_duplicates)

    @property
    def full_match(self) -> bool:
        return self.first_divergence is None and self.matched == self.reproducible_total

    def summary(self) -> str:
        lines = [f"match: {self.matched}/{self.reproducible_total}"]
        for pos, text, witness in self.skipped_duplicates:
            lines.append(
                f"reference[{pos}] {text} skipped: value equals entry #{witness}"
            )
        for idx, text in self.insertions:
            lines.append(f"stream entry #{idx} {text} absent from reference")
        if self.first_divergence is not None:
            lines.append(f"first divergence at reference position {self.first_divergence}")
        return "\n".join(lines)


def _value_string(entry: SequenceEntry) -> str:
    with mpmath.workdps(40):
        if entry.exact is not None:
            value = mpmath.mpf(entry.exact.numerator) / entry.exact.denominator
        elif isinstance(entry.nf, BigPow):
            base = mpmath.mpf(entry.nf.k.numerator) / entry.nf.k.denominator
            value = mpmath.power(base, entry.nf.m)
        else:
            lo, hi = eval_interval(entry.expr, digits_to_bits(60))
            mid = (lo + hi) / 2
            value = mpmath.mpf(mid.numerator) / mid.denominator
        return mpmath.nstr(value, 20)


def entry_record(entry: SequenceEntry) -> dict:
    """The stable JSONL record for one committed entry."""
    return {
        "index": entry.index,
        "weight": entry.weight,
        "expr": render(entry.expr),
        "value": _value_string(entry),
        "exact": entry.is_rational,
    }
