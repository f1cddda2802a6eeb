"""Print certified decimal digits and settle comparisons between towers.

Every digit shown is backed by an interval enclosure: tightening the working
precision until the k-th decimal place is pinned.  Comparisons either decide
strictly, prove exact equality through normal forms, or report that the
precision cap was not enough to separate the two values.
"""

from powertowers.evaluator import Comparison, compare_values, decimal_digits
from powertowers.expr import parse


def show_digits(text, k):
    digits, exact = decimal_digits(parse(text), k)
    tag = "exact" if exact else "irrational"
    print(f"  {text}: fractional digits {digits}  [{tag}]")


def main():
    print("certified digits:")
    show_digits("(2/1)^[(2/1)^(1/2)]", 50)  # 2 to the power sqrt(2)
    show_digits("(2/1)^(1/2)", 40)
    show_digits("(22/7)", 12)

    print()
    print("comparisons:")
    pairs = [
        ("(2/1)^(1/2)", "(3/2)"),
        ("(4/1)^(1/3)", "(2/1)^(2/3)"),  # same value through different forms
        ("(2/1)^[(2/1)^(1/2)]", "(8/3)"),
    ]
    for left, right in pairs:
        verdict = compare_values(parse(left), parse(right))
        name = Comparison(verdict).name
        print(f"  {left} vs {right}: {name}")


if __name__ == "__main__":
    main()
