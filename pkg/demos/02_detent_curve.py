#!/usr/bin/env python3
"""Plot-ready data for the magnetic detent torque and the breakaway point.

The magnet pair that parks each finger body resists rotation with a torque
that rises steeply from the rest position, peaks within a few degrees, and
then falls away.  Whatever motor torque pushes the bodies past that peak
wins, so the peak fixes the breakaway threshold.

Writes detent_curve.csv (body angle vs torque) next to this script.
"""

import csv
import math
from pathlib import Path

from multigrip import (DEFAULT_GEARS, DEFAULT_MAGNET, breakaway_motor_torque,
                       detent_peak, detent_torque)


def main() -> None:
    magnet = DEFAULT_MAGNET
    angle_peak, torque_peak = detent_peak(magnet)
    threshold = breakaway_motor_torque(DEFAULT_GEARS, magnet)

    print(f"magnet coefficient : {magnet.magnet_coefficient:g} N*mm^2")
    print(f"peak angle         : {math.degrees(angle_peak):.3f} deg")
    print(f"peak torque        : {torque_peak:.4g} N*mm")
    print(f"breakaway torque   : {threshold:.4g} N*mm at the motor")
    print()
    print("Doubling the magnet strength doubles both torques but leaves the")
    print("peak angle where the geometry put it:")
    from multigrip import MagnetDetent
    strong = MagnetDetent(2 * magnet.magnet_coefficient, magnet.circle_radius,
                          magnet.nominal_gap)
    a2, t2 = detent_peak(strong)
    print(f"  2x coefficient -> peak {math.degrees(a2):.3f} deg, "
          f"torque {t2:.4g} N*mm")

    out = Path(__file__).parent / "detent_curve.csv"
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["body_angle_deg", "torque_nmm"])
        for i in range(0, 1201):
            deg = i * 0.1
            writer.writerow([deg, detent_torque(math.radians(deg), magnet)])
    print(f"\nwrote {out}")


if __name__ == "__main__":
    main()
