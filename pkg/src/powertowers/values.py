"""Exact value classification for tower expressions.

Every tower value is a positive real built from rationals by exponentiation.
This module classifies values bottom-up into one of

  * ``Exact(q)``       -- a proven rational, as a reduced Fraction;
  * ``BigPow(k, M)``   -- the proven rational k**M, k a kernel and M an
                          integer, kept symbolic because the plain fraction
                          would need more than _MAX_BITS bits;
  * ``Rad(K, y)``      -- the algebraic irrational K**y, K a kernel and y a
                          non-integral rational;
  * ``Pw(K, c, x)``    -- the transcendental K**(c*x), K a kernel, c a
                          nonzero rational, x an irrational exponent form;
  * ``None``           -- no normal form found ("irrational or unknown").

A kernel is a rational > 1 that is not a perfect power.  Rationality uses
the q-th-root criterion: a reduced base a/b raised to a reduced exponent
p/q is rational iff a and b are both perfect q-th powers (equivalently,
with a/b = k**g for a kernel k: iff q divides g*p).

Canonicity.  A positive real of the shape prod p_i**x_i with rational x_i
determines the exponent vector x (raise an equality to the common
denominator and use unique factorization).  Writing x = y*kappa with y > 0
the rational gcd of the x_i and kappa a primitive integer vector gives the
unique presentation K**y with K = prod p_i**kappa_i a kernel, up to the
sign flip (K, y) -> (1/K, -y) that the K > 1 convention fixes.  So Exact,
BigPow and Rad are complete as well as sound: equal values get equal forms.
The Exact/BigPow boundary tests only (K, y), so no value is Exact on one
route and BigPow on another.

Pw with a Rad exponent is canonical too: K**(c*x) = K'**(c'*x') with c*x,
c'*x' irrational algebraic forces log(K)/log(K') to be rational (were it
irrational it would be algebraic, and K = K'**that would be transcendental
by Gelfond-Schneider), hence K = K' for kernels, hence c*x = c'*x', and
the signed canonical radical pins (c, x); here c is just the sign, +-1,
since |c| folds into the Rad.  These values are transcendental
(Gelfond-Schneider again), so they never collide with the algebraic
classes.  Pw with a nested Pw exponent is sound only (equal forms certify
equal values, distinct forms prove nothing); the enumerator separates
those by interval arithmetic.

Values whose *description* outgrows every representation (an exponent that
is itself a BigPow, say 2^(2^(2^81)), or normalization that would need to
factor or materialize numbers beyond the bit guards) raise OverflowError;
enumerating at such weights is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import gmpy2
from sympy import factorint

from .expr import Atom, Tower

# exact integer powers beyond this many result bits raise OverflowError
_MAX_BITS = 1 << 26
# refuse to factor integers beyond this many bits during normalization
_MAX_FACTOR_BITS = 1 << 16


@dataclass(frozen=True)
class Exact:
    q: Fraction


@dataclass(frozen=True)
class BigPow:
    """The rational k**M, k a kernel > 1, M a nonzero integer, |result| huge."""

    k: Fraction
    m: int


@dataclass(frozen=True)
class Rad:
    """K**y with K a kernel > 1 and y a non-integral rational."""

    K: Fraction
    y: Fraction


@dataclass(frozen=True)
class Pw:
    """K**(c*x) with K a kernel > 1, c nonzero rational, x irrational.

    When x is a Rad, c is a bare sign (+1 or -1); magnitudes fold into x.
    When x is a nested Pw, c is unrestricted and the form is sound only.
    """

    K: Fraction
    c: Fraction
    x: "Rad | Pw"


ValueNF = Exact | BigPow | Rad | Pw


def iroot(n: int, q: int) -> tuple[int, bool]:
    """Integer q-th root of n >= 1 and whether it is exact."""
    root, exact = gmpy2.iroot(gmpy2.mpz(n), q)
    return int(root), bool(exact)


def kernel(a: Fraction) -> tuple[Fraction, int]:
    """Write a = k**g with k > 1 not a perfect power and g a nonzero integer."""
    assert a > 0 and a != 1
    if a < 1:
        k, g = kernel(1 / a)
        return k, -g
    n, d = a.numerator, a.denominator
    for j in range(n.bit_length(), 1, -1):
        rn, okn = iroot(n, j)
        if not okn:
            continue
        if d == 1:
            return Fraction(rn), j
        rd, okd = iroot(d, j)
        if okd:
            return Fraction(rn, rd), j
    return a, 1


def _kernel_size(k: Fraction) -> int:
    return k.numerator.bit_length() + k.denominator.bit_length()


def _int_power(k: Fraction, m: int) -> ValueNF:
    """k**m for a kernel k > 1 and integer m; symbolic when it would be huge.

    The boundary test uses only (k, m), which is the canonical description
    of the value, so every computation route agrees on Exact vs BigPow.
    """
    if m == 0:
        return Exact(Fraction(1))
    if _kernel_size(k) * abs(m) > _MAX_BITS:
        return BigPow(k, m)
    return Exact(k ** m)


def _kernel_power(k: Fraction, e: Fraction) -> ValueNF:
    """k**e for a kernel k > 1 and any nonzero rational e."""
    if e.denominator == 1:
        return _int_power(k, e.numerator)
    return Rad(k, e)


def rational_pow(a: Fraction, e: Fraction) -> ValueNF:
    """Classify a**e for positive rational a and nonzero rational e."""
    assert a > 0 and e != 0
    if a == 1:
        return Exact(Fraction(1))
    k, g = kernel(a)
    # a**e = k**(g*e); integral g*e is exactly the q-th-root criterion
    return _kernel_power(k, g * e)


# --- exponent vectors -------------------------------------------------------


def _factor(n: int) -> dict[int, int]:
    if n.bit_length() > _MAX_FACTOR_BITS:
        raise OverflowError(f"cannot normalize a {n.bit_length()}-bit factor")
    return factorint(n)


def _add_rational(vec: dict[int, Fraction], q: Fraction, scale: Fraction) -> None:
    """vec += scale * exponent-vector-of(q), for a positive rational q."""
    for n, sign in ((q.numerator, 1), (q.denominator, -1)):
        if n != 1:
            for p, e in _factor(n).items():
                vec[p] = vec.get(p, Fraction(0)) + sign * e * scale


def _power_from_vector(vec: dict[int, Fraction]) -> ValueNF:
    """The canonical form of prod p**x_p over a rational exponent vector."""
    xs = [x for x in vec.values() if x]
    if not xs:
        return Exact(Fraction(1))
    y = Fraction(
        gcd(*(abs(x.numerator) for x in xs)),
        lcm(*(x.denominator for x in xs)),
    )
    items = [(p, int(x / y)) for p, x in vec.items() if x]
    bits = sum(p.bit_length() * abs(e) for p, e in items)
    if bits > _MAX_BITS:
        raise OverflowError(f"normalized kernel needs ~{bits} bits")
    K = Fraction(1)
    for p, e in items:
        K *= Fraction(p) ** e
    if K < 1:
        K, y = 1 / K, -y
    if y.denominator == 1:
        return _int_power(K, y.numerator)
    return Rad(K, y)


# --- exponent forms ---------------------------------------------------------
#
# Inside pow_nf an exponent is (c, t): the rational c when t is None, else
# the product c*t with t a Rad or Pw.  For t a Rad the pair is normalized
# so that c is +-1.


def _exp_parts(nf: ValueNF) -> tuple[Fraction, Rad | Pw | None]:
    if isinstance(nf, Exact):
        return nf.q, None
    if isinstance(nf, Rad):
        return Fraction(1), nf
    assert isinstance(nf, Pw)
    return Fraction(1), nf


def _exp_mul(
    c1: Fraction, t1: Rad | Pw | None, c2: Fraction, t2: Rad | Pw | None
) -> tuple[Fraction, Rad | Pw | None] | None:
    """(c1*t1) * (c2*t2) as a normalized exponent form; None if unsupported."""
    c = c1 * c2
    assert c != 0
    if t1 is None and t2 is None:
        return c, None
    if isinstance(t1, Pw) or isinstance(t2, Pw):
        if t1 is None or t2 is None:
            return c, t1 if t2 is None else t2
        return None  # products of transcendental exponents stay unclassified
    if abs(c) == 1 and (t1 is None or t2 is None):
        return c, t1 if t2 is None else t2
    vec: dict[int, Fraction] = {}
    _add_rational(vec, abs(c), Fraction(1))
    for t in (t1, t2):
        if t is not None:
            _add_rational(vec, t.K, t.y)
    sign = 1 if c > 0 else -1
    out = _power_from_vector(vec)
    if isinstance(out, BigPow):
        raise OverflowError(
            f"exponent {out.k}**{out.m} is beyond supported scale"
        )
    if isinstance(out, Exact):
        return sign * out.q, None
    return Fraction(sign), out


def _pw(K: Fraction, c: Fraction, t: Rad | Pw | None) -> ValueNF:
    """K**(c*t) for a kernel K > 1 and a normalized exponent form."""
    if t is None:
        return _kernel_power(K, c)
    return Pw(K, c, t)


def pow_nf(base: ValueNF | None, exp: ValueNF | None) -> ValueNF | None:
    """Normal form of base**exp; None when no form is found.

    The base-1 fast path applies even when the exponent is unclassified:
    1**x = 1 for every positive real x.
    """
    if isinstance(base, Exact) and base.q == 1:
        return Exact(Fraction(1))
    if base is None or exp is None:
        return None
    if isinstance(exp, BigPow):
        # the exponent alone is astronomically large; base != 1, so the
        # result has no representation at any supported scale
        raise OverflowError(
            f"tower value {base}**({exp.k}**{exp.m}) is beyond supported scale"
        )

    ec, et = _exp_parts(exp)
    if isinstance(base, Pw):
        # (K**(c*x))**exp = K**((c*x)*exp)
        prod = _exp_mul(base.c, base.x, ec, et)
        if prod is None:
            return None
        return _pw(base.K, *prod)

    if isinstance(base, Exact):
        K, g = kernel(base.q)
        y0 = Fraction(g)
    elif isinstance(base, BigPow):
        K, y0 = base.k, Fraction(base.m)
    else:
        assert isinstance(base, Rad)
        K, y0 = base.K, base.y
    # base = K**y0, so base**exp = K**(y0*ec*et)
    prod = _exp_mul(y0 * ec, None, Fraction(1), et)
    assert prod is not None
    return _pw(K, *prod)


def classify_atom(atom: Atom) -> ValueNF:
    """Atoms always classify: their exponents are rational or radical."""
    base = atom.base.as_fraction()
    if atom.mid is None:
        return Exact(base)
    if atom.top is None:
        return rational_pow(base, atom.mid.as_fraction())
    inner = rational_pow(atom.mid.as_fraction(), atom.top.as_fraction())
    result = pow_nf(Exact(base), inner)
    assert result is not None
    return result


def classify(expr: Tower) -> ValueNF | None:
    """Bottom-up normal form of a tower's value; None if unclassified."""
    value: ValueNF | None = classify_atom(expr.atoms[-1])
    for atom in reversed(expr.atoms[:-1]):
        value = pow_nf(classify_atom(atom), value)
    return value


def exact_rational(expr: Tower) -> Fraction | None:
    """The exact rational value of expr, when rationality is provable.

    BigPow values are proven rational too, but have no Fraction form; they
    yield None here, like the unknown cases.  Callers that must tell the
    difference should inspect `classify` directly.
    """
    value = classify(expr)
    if isinstance(value, Exact):
        return value.q
    return None
