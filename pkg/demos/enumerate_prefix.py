"""Walk the opening of the deduplicated sequence and show what was skipped.

The enumerator visits every expression of each weight in a fixed order and
commits only first representatives of each value.  Run this to see the first
twenty committed entries and the duplicates dropped along the way.
"""

from powertowers.enumeration import Enumerator
from powertowers.expr import render


def main():
    enum = Enumerator()
    print("first 20 committed entries:")
    for entry in enum.stream(max_count=20):
        kind = "rational" if entry.exact is not None else "irrational"
        print(f"  #{entry.index:>2}  w{entry.weight}  {render(entry.expr)}  ({kind})")

    print()
    print(f"generated: {enum.counters['generated']}")
    print(f"committed: {enum.counters['committed']}")
    print(f"skipped duplicates: {enum.counters['skipped_duplicate']}")

    print()
    print("examples of value collisions at weight 4:")
    for expr_text in ("(2/2)", "(1/1)^(1/1)"):
        print(f"  {expr_text} duplicates (1/1), so it never appears")


if __name__ == "__main__":
    main()
