#!/usr/bin/env python3
"""Walk through the drivetrain statics: motor torque in, forces out.

The motor turns an input sprocket that tensions a roller chain; the chain
pulls both finger units.  While grasping, each finger presses with the full
chain tension, so grasp force is simply motor torque over sprocket radius.
At the stopper the same tension turns into shaft and body torques instead.
"""

from multigrip import (DEFAULT_GEARS, chain_tension, drivetrain_forces,
                       grasp_forces)


def main() -> None:
    g = DEFAULT_GEARS
    print("=" * 64)
    print("Drivetrain statics (reference gear set)")
    print("=" * 64)
    print(f"input sprocket radius : {g.input_sprocket_radius:6.1f} mm")
    print(f"shaft sprocket radius : {g.shaft_sprocket_radius:6.1f} mm")
    print(f"torque arm 3S / 4S    : {g.torque_arm_3s:6.1f} / {g.torque_arm_4s:.1f} mm")
    print()

    print(f"{'tau_m [N*mm]':>12} {'f_chain [N]':>12} {'f_grasp [N]':>12} "
          f"{'tau_3S [N*mm]':>14} {'tau_4S [N*mm]':>14}")
    for tau_m in (100, 200, 400, 600, 800):
        f = drivetrain_forces(tau_m, g)
        print(f"{tau_m:>12} {f.chain_tension:>12.1f} {f.grasp_force_3s:>12.1f} "
              f"{f.body_torque_3s:>14.1f} {f.body_torque_4s:>14.1f}")

    print()
    print("Everything is linear in the motor torque:")
    print(f"  20 N of grasp force needs  {20 * g.input_sprocket_radius:.0f} N*mm")
    print(f"  40 N of grasp force needs  {40 * g.input_sprocket_radius:.0f} N*mm")
    assert grasp_forces(400.0, g) == (chain_tension(400.0, g),) * 2


if __name__ == "__main__":
    main()
