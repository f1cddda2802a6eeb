"""Expression core: rational power towers in canonical form.

An expression is a right-associated chain of atoms

    tower := a1 ^ (a2 ^ (... ^ an))

where each atom is a 1-, 2- or 3-level rational power

    atom  := (m/n)  |  (m/n)^(p/q)  |  (m/n)^[(p/q)^(r/s)]

with strictly positive integer numerators and denominators.  Fractions are
kept *unreduced*: (2/4) and (1/2) are distinct expressions (they only get
identified later, by value).

Canonical grammar (no whitespace, INT has no leading zeros):

    frac  := '(' INT '/' INT ')'          INT := [1-9][0-9]*
    atom  := frac | frac '^' frac | frac '^' '[' frac '^' frac ']'
    tower := atom | atom '^' '{' tower '}'

The *weight* of an expression is the sum of every numerator and denominator
appearing in it; it is the stratification level used by the enumerator.

`enum_compare` defines the total candidate order inside a weight block:

    1. weight ascending;
    2. number of atoms ascending;
    3. single atoms: level count ascending, then
         - 1-level: denominator ascending,
         - 2-level: (exponent weight, exponent den, base den) ascending,
         - 3-level: (top weight, top den, mid weight, mid den, base den);
    4. multi-atom towers: the weight composition (w2, ..., wk) of the
       trailing atoms compared lexicographically ascending, then the atoms
       themselves compared from the top of the chain down (a_k first).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class ParseError(ValueError):
    """Raised on malformed canonical input; `offset` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Rational:
    """A positive fraction num/den, deliberately not reduced."""

    num: int
    den: int

    def __post_init__(self):
        if self.num < 1 or self.den < 1:
            raise ValueError(f"numerator and denominator must be >= 1, got {self.num}/{self.den}")

    @property
    def weight(self) -> int:
        return self.num + self.den

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def render(self) -> str:
        return f"({self.num}/{self.den})"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Atom:
    """base, base^mid or base^(mid^top); mid/top are the exponent levels."""

    base: Rational
    mid: Rational | None = None
    top: Rational | None = None

    def __post_init__(self):
        if self.top is not None and self.mid is None:
            raise ValueError("3-level atom requires a mid exponent")

    @property
    def levels(self) -> int:
        return 1 + (self.mid is not None) + (self.top is not None)

    @property
    def weight(self) -> int:
        w = self.base.weight
        if self.mid is not None:
            w += self.mid.weight
        if self.top is not None:
            w += self.top.weight
        return w

    def render(self) -> str:
        if self.mid is None:
            return self.base.render()
        if self.top is None:
            return f"{self.base.render()}^{self.mid.render()}"
        return f"{self.base.render()}^[{self.mid.render()}^{self.top.render()}]"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Tower:
    """Nonempty right-associated chain of atoms a1^(a2^(...^an))."""

    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("tower must contain at least one atom")

    @property
    def weight(self) -> int:
        return sum(a.weight for a in self.atoms)

    def tail(self) -> "Tower":
        # the exponent chain a2^(...^an); only valid for multi-atom towers
        if len(self.atoms) < 2:
            raise ValueError("single-atom tower has no tail")
        return Tower(self.atoms[1:])

    def render(self) -> str:
        out = self.atoms[-1].render()
        for atom in reversed(self.atoms[:-1]):
            out = f"{atom.render()}^{{{out}}}"
        return out

    def __str__(self) -> str:
        return self.render()


def tower(*parts) -> Tower:
    """Convenience constructor: tower((2,1), ((3,1),(1,2))) etc.

    Each part is an atom spec: (num, den) for a 1-level atom, a pair of
    fraction tuples for 2 levels, a triple for 3 levels.
    """
    atoms = []
    for part in parts:
        if isinstance(part, Atom):
            atoms.append(part)
            continue
        if len(part) == 2 and all(isinstance(x, int) for x in part):
            atoms.append(Atom(Rational(*part)))
        else:
            fracs = [Rational(*p) for p in part]
            atoms.append(Atom(*fracs))
    return Tower(tuple(atoms))


# --- parsing -----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos)

    def expect(self, token: str):
        if not self.text.startswith(token, self.pos):
            raise self.error(f"expected {token!r}")
        self.pos += len(token)

    def peek(self, token: str) -> bool:
        return self.text.startswith(token, self.pos)

    def parse_int(self) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        digits = self.text[start:self.pos]
        if not digits:
            raise self.error("expected integer")
        if digits[0] == "0":
            self.pos = start
            raise self.error("integer may not have a leading zero")
        return int(digits)

    def parse_frac(self) -> Rational:
        self.expect("(")
        num = self.parse_int()
        self.expect("/")
        den = self.parse_int()
        self.expect(")")
        return Rational(num, den)

    def parse_atom(self) -> Atom:
        base = self.parse_frac()
        # an exponent introduced by '^{' belongs to the tower level, not here
        if not self.peek("^") or self.peek("^{"):
            return Atom(base)
        self.expect("^")
        if self.peek("["):
            self.expect("[")
            mid = self.parse_frac()
            self.expect("^")
            top = self.parse_frac()
            self.expect("]")
            return Atom(base, mid, top)
        mid = self.parse_frac()
        return Atom(base, mid)

    def parse_tower(self) -> Tower:
        atoms = [self.parse_atom()]
        while self.peek("^{"):
            self.expect("^{")
            rest = self.parse_tower()
            self.expect("}")
            atoms.extend(rest.atoms)
            break
        return Tower(tuple(atoms))


def parse(text: str) -> Tower:
    """Parse a canonical expression string; raises ParseError with offset."""
    parser = _Parser(text)
    result = parser.parse_tower()
    if parser.pos != len(text):
        raise ParseError("trailing input", parser.pos)
    return result


def render(expr: Tower) -> str:
    return expr.render()


# --- candidate order ---------------------------------------------------------


def atom_sort_key(atom: Atom) -> tuple:
    """Order among atoms of equal weight (also total with weight prefixed)."""
    if atom.mid is None:
        return (atom.weight, 1, atom.base.den)
    if atom.top is None:
        return (atom.weight, 2, atom.mid.weight, atom.mid.den, atom.base.den)
    return (
        atom.weight,
        3,
        atom.top.weight,
        atom.top.den,
        atom.mid.weight,
        atom.mid.den,
        atom.base.den,
    )


def tower_sort_key(expr: Tower) -> tuple:
    tail_weights = tuple(a.weight for a in expr.atoms[1:])
    atom_keys = tuple(atom_sort_key(a) for a in reversed(expr.atoms))
    return (expr.weight, len(expr.atoms), tail_weights, atom_keys)


def enum_compare(a: Tower, b: Tower) -> int:
    """Total candidate order; -1, 0 or 1 like an old-style cmp."""
    ka, kb = tower_sort_key(a), tower_sort_key(b)
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0
