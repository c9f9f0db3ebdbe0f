#!/usr/bin/env python3
"""Simulate the self-switching motion and dump its trace.

Starting 3 mm short of the stopper, an opening position command first
translates the fingers, then builds torque against the stopper until the
magnetic detents break, rotates both finger bodies through one switch
interval, and re-engages at the next surface pair.

Writes switch_trace.csv and switch_events.csv next to this script.
"""

import math
from pathlib import Path

from multigrip import (DEFAULT_COUNTS, DEFAULT_GEARS, DEFAULT_MAGNET,
                       run_scenario, switch_scenario)
from multigrip.sim import write_events_csv, write_trace_csv


def main() -> None:
    scenario, controller = switch_scenario(
        DEFAULT_GEARS, DEFAULT_MAGNET, DEFAULT_COUNTS,
        from_mode=1, to_mode=3, gap=3.0)
    trace = run_scenario(scenario)

    print(f"steps simulated : {len(trace.rows) - 1}")
    print(f"final mode      : {trace.final_state.mode_index} "
          f"(controller thinks {controller.k_now})")
    print(f"body angles     : 3S {math.degrees(trace.final_state.theta_fb_3s):.1f} deg, "
          f"4S {math.degrees(trace.final_state.theta_fb_4s):.1f} deg")
    print("\nevents:")
    for event in trace.events:
        row = trace.rows[event.step]
        print(f"  step {event.step:>5}  theta_m {math.degrees(row.theta_m):8.3f} deg  "
              f"{event.kind} {event.detail}")

    here = Path(__file__).parent
    with open(here / "switch_trace.csv", "w", newline="") as fh:
        write_trace_csv(trace, fh)
    with open(here / "switch_events.csv", "w", newline="") as fh:
        write_events_csv(trace, fh)
    print(f"\nwrote {here / 'switch_trace.csv'} and {here / 'switch_events.csv'}")


if __name__ == "__main__":
    main()
