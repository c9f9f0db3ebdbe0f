"""multigrip: quasi-static model of a single-motor multi-surface gripper.

One motor both opens/closes the fingers and, past the fully-open stop,
rotates the finger bodies to switch which surfaces face the object.  The
package covers the drivetrain statics and magnetic-detent mechanics, a
deterministic scenario simulator, the torque/position controller, planar
grasp classification (form closure, force closure, caging) and rule-based
mode selection, plus a CLI over all of it.
"""

from .mechanics import (DEFAULT_COUNTS, DEFAULT_GEARS, DEFAULT_MAGNET,
                        DrivetrainForces, GearGeometry, GearingViolation,
                        MagnetDetent, SurfaceCounts, body_torques,
                        breakaway_motor_torque, chain_tension, detent_peak,
                        detent_torque, drivetrain_forces, finger_body_angles,
                        gc_mode_count, grasp_forces, switch_interval,
                        validate_antipodal_gearing)
from .modes import (GcModeTable, SurfaceKind, SurfaceShape, build_mode_table,
                    concave, convex, deformable_flat, distinct_shape_pairs,
                    flat)
from .control import (ControllerState, Direction, MotorCommand, PositionMove,
                      TorqueRamp, grasp_command, release_command,
                      release_then_switch, switch_command, switch_rotation)
from .sim import (GripperState, Phase, Scenario, SimTrace, body_torque_trace,
                  grasp_scenario, run_scenario, step, switch_scenario)
from .objects import (Box, Circle, CompositeFaces, FaceArc, ObjectDescription,
                      ObjectSpec, ThinPlate, parse_object_file)
from .grasp import (Contact, ContactSet, GraspOutcome, GraspResult,
                    caging_test, classify_grasp, closure_separation,
                    compute_contacts, force_closure_test, form_closure_test,
                    surface_profile)
from .planner import (ObjectFace, ObjectFaces, PlannerThresholds, PlanResult,
                      candidate_surfaces, select_mode)
from .config import RunConfig, default_config, load_config, parse_config

__version__ = "0.1.0"
