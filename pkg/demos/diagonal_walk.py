"""Assemble a number that differs from every listed element, then bound
how far away it provably is.

The walk reads element nu's decimal at place nu (values taken mod 1) and
writes a different digit there.  The difference profile turns each pinned
disagreement into certified lower and upper bounds on the distance, with
the bare comparison series 10**-k alongside.
"""

from fractions import Fraction

from powertowers.cantor import (
    TowerEnumeration,
    diagonal,
    diagonal_difference_profile,
    series_string,
)


def main():
    source = TowerEnumeration()
    n = 8

    result = diagonal(source, n)
    print(f"diagonal over the first {n} tower values:")
    for element in result.elements:
        print(
            f"  nu={element.index}: {element.label}  "
            f"diag digit {element.diag_digit} -> out digit {element.out_digit}  "
            f"(place {element.position})"
        )
    print(f"assembled prefix: {result.output_prefix()}")

    print()
    profile = diagonal_difference_profile(source, n)
    lo, hi = profile.rule_image
    print(f"difference profile (rule image {lo}..{hi}):")
    for row in profile.rows:
        print(
            f"  k={row.k}: |difference| in [{row.lower}, {row.upper}], "
            f"series term {series_string(row.k)}"
        )
        assert row.series == Fraction(1, 10**row.k)


if __name__ == "__main__":
    main()
