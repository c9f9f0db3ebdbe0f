#!/usr/bin/env python3
"""Classify grasps of the primitive test objects in several modes.

The classifier closes the fingers symmetrically until something touches,
computes the contact set, and works down the precedence ladder: form
closure (geometry alone immobilizes), force closure (needs friction),
caging (trapped but loose), fail.
"""

from multigrip import ObjectSpec, classify_grasp
from multigrip.modes import concave, convex, deformable_flat, flat
from multigrip.objects import Box, Circle, ThinPlate

OBJECTS = {
    "large cylinder (r=15)": ObjectSpec(Circle(15.0), mu=0.5),
    "small cylinder (r=5)": ObjectSpec(Circle(5.0), mu=0.5),
    "box 20x25": ObjectSpec(Box(20.0, 25.0), mu=0.5),
    "thin plate (1 mm)": ObjectSpec(ThinPlate(30.0, 1.0), mu=0.5),
}

MODES = {
    "GC1 flat|flat": (flat(), flat()),
    "GC2 convex|convex": (convex(10.0), convex(10.0)),
    "GC3 concave|concave": (concave(10.0), concave(10.0)),
    "GC4 flat|deformable": (flat(), deformable_flat()),
}


def main() -> None:
    width = max(len(n) for n in OBJECTS)
    header = f"{'object':<{width}}  " + "  ".join(f"{m:<20}" for m in MODES)
    print(header)
    print("-" * len(header))
    for name, obj in OBJECTS.items():
        cells = []
        for pair in MODES.values():
            result = classify_grasp(obj, pair)
            text = result.outcome.value
            if result.posture_uncertain:
                text += " (!)"
            cells.append(f"{text:<20}")
        print(f"{name:<{width}}  " + "  ".join(cells))
    print("\n(!) posture uncertain: the object may settle pinched or tilted")

    result = classify_grasp(OBJECTS["large cylinder (r=15)"],
                            MODES["GC3 concave|concave"])
    print("\nlarge cylinder in GC3: contacts at the pocket edges")
    for c in result.contacts:
        print(f"  {c.finger}: point ({c.point[0]:7.3f}, {c.point[1]:7.3f})  "
              f"normal ({c.normal[0]:+.3f}, {c.normal[1]:+.3f})")


if __name__ == "__main__":
    main()
