"""Run the nested-interval procedure against two different streams.

Given any listed sequence and an interval (a, b), each step finds the first
two sequence elements strictly inside the current interval and shrinks to
them.  The point squeezed out exists but can never be listed, and the trace
below shows exactly which indices forced each contraction.
"""

from powertowers.cantor import (
    Eq15Example,
    RationalsCalkinWilf,
    nested_intervals,
    nested_records,
)


def show(source, a, b, depth):
    trace = nested_intervals(source, a, b, depth=depth)
    print(f"source={trace.source}  interval=({a}, {b})  depth={depth}")
    for row in nested_records(trace):
        print(
            f"  level {row['level']}: "
            f"alpha=#{row['alpha_index']} {row['alpha']}, "
            f"beta=#{row['beta_index']} {row['beta']}, "
            f"scanned {row['scanned']}"
        )
    print(f"  termination: {trace.termination}")
    print()


def main():
    # the worked stream: endpoints close on 1 at exact speed 1/(n+2)
    show(Eq15Example(), 0, 2, depth=6)
    show(RationalsCalkinWilf(), 0, 1, depth=5)


if __name__ == "__main__":
    main()
