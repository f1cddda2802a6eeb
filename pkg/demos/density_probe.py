"""Measure how closely the expressions approach familiar constants.

For each weight bound W the probe scans every committed entry up to W and
keeps the one whose certified error against the target is smallest.  The
errors can only shrink as W grows; watching how fast says something about
how densely the values crowd the line near each constant.
"""

from powertowers.approx import TargetSpec, density_profile, error_string
from powertowers.enumeration import Enumerator
from powertowers.expr import render


def main():
    weights = [3, 6, 9, 12, 15]
    enum = Enumerator()  # shared across targets: one scan, two profiles
    for name in ("e", "pi"):
        profile = density_profile(TargetSpec.named(name), weights, enumerator=enum)
        print(f"target {name}:")
        for row in profile.rows:
            print(
                f"  W={row.weight:>2}  best {render(row.entry.expr):<24}"
                f"  error <= {error_string(row.error)}"
            )
        print()


if __name__ == "__main__":
    main()
