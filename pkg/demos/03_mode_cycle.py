#!/usr/bin/env python3
"""Enumerate the grasping-configuration cycle.

Because the two finger bodies carry coprime surface counts (3 and 4) and
both advance one surface per switch, twelve switches visit every ordered
surface pairing before the cycle repeats.  Ignoring which finger carries
which surface, nine distinct pairings remain.
"""

import math

from multigrip import (DEFAULT_COUNTS, DEFAULT_GEARS, build_mode_table,
                       distinct_shape_pairs, gc_mode_count, switch_interval)


def main() -> None:
    table = build_mode_table(DEFAULT_COUNTS)
    interval = math.degrees(switch_interval(DEFAULT_GEARS, DEFAULT_COUNTS))

    print(f"modes in one cycle : {gc_mode_count(DEFAULT_COUNTS)}")
    print(f"switch interval    : {interval:g} deg of motor rotation")
    print(f"full cycle         : {gc_mode_count(DEFAULT_COUNTS) * interval:g} deg")
    print()
    print(f"{'mode':>4}  {'3S surface':<14} {'4S surface':<14}")
    for k in range(1, len(table) + 1):
        s3, s4 = table.entry(k)
        print(f"{table.label(k):>4}  {str(s3):<14} {str(s4):<14}")

    pairs = distinct_shape_pairs(table)
    print(f"\nunordered pairings: {len(pairs)}")
    for a, b in sorted(pairs, key=lambda p: (str(p[0]), str(p[1]))):
        print(f"  {a} | {b}")


if __name__ == "__main__":
    main()
