"""Deterministic quasi-static state machine for the gripper drivetrain.

Motor rotation in the opening direction is positive.  Finger travel d_f is
measured from the stopper (0 = fully open) and grows toward closing; both
finger units ride the same chain and always share one travel value.  The
evolution is quasi-static: position commands advance the motor by fixed
angle increments, torque commands ramp the torque by fixed increments, and
contact with the object or the stopper is rigid.

Within one step the state changes by at most one motion kind (translation
or body rotation, never both), and steps land exactly on contact, stopper
and detent boundaries so events line up with trace rows.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

from .control import (ControllerState, Direction, MotorCommand, PositionMove,
                      TorqueRamp, grasp_command, switch_command)
from .mechanics import (GearGeometry, MagnetDetent, SurfaceCounts,
                        breakaway_motor_torque, detent_peak, detent_torque,
                        gc_mode_count, switch_interval)

__all__ = [
    "Phase",
    "GripperState",
    "Scenario",
    "TraceRow",
    "SimEvent",
    "SimTrace",
    "SimError",
    "StrokeLimitExceeded",
    "UnreachableTarget",
    "ReversalDuringRotation",
    "ScenarioError",
    "EVENT_OBJECT_CONTACT",
    "EVENT_STOPPER_CONTACT",
    "EVENT_BREAKAWAY",
    "EVENT_DETENT_REENGAGE",
    "EVENT_MODE_CHANGED",
    "at_detent",
    "initial_state",
    "step",
    "run_scenario",
    "body_torque_trace",
    "grasp_scenario",
    "switch_scenario",
    "write_trace_csv",
    "write_events_csv",
    "TRACE_HEADER",
    "EVENTS_HEADER",
]

EVENT_OBJECT_CONTACT = "ObjectContact"
EVENT_STOPPER_CONTACT = "StopperContact"
EVENT_BREAKAWAY = "Breakaway"
EVENT_DETENT_REENGAGE = "DetentReengage"
EVENT_MODE_CHANGED = "ModeChanged"

_EPS_ANGLE = 1e-12
_EPS_TRAVEL = 1e-9
# Boundary landings tolerate this much motor angle (rad) of float drift, so
# accumulated rounding cannot leave a step stranded an ulp short of a
# stopper, contact or detent.
_EPS_LANDING = 1e-9


class Phase(Enum):
    TRANSLATING_CLOSE = "translating_close"
    GRASPING = "grasping"
    TRANSLATING_OPEN = "translating_open"
    AT_STOPPER = "at_stopper"
    ROTATING = "rotating"
    DETENT_ENGAGED = "detent_engaged"


# Phases in which the finger bodies rest at a detent.
_AT_DETENT = frozenset({Phase.TRANSLATING_CLOSE, Phase.GRASPING,
                        Phase.TRANSLATING_OPEN, Phase.AT_STOPPER,
                        Phase.DETENT_ENGAGED})


def at_detent(phase: Phase) -> bool:
    """Whether the finger bodies rest at an engaged detent in this phase."""
    return phase in _AT_DETENT


class SimError(Exception):
    """Base class for simulation-rule violations."""


class StrokeLimitExceeded(SimError):
    pass


class UnreachableTarget(SimError):
    """A position command ran into a rigid contact before its target."""


class ReversalDuringRotation(SimError):
    """A command reversed the drive direction while a switch was in flight.

    The ratchet forbids reverse body rotation, so the in-flight rotation
    resolves to the nearest stable detent: forward to the next detent when
    the body is past the detent-torque peak, back to the previous one
    otherwise.  The resolved rest state is attached for recovery.
    """

    def __init__(self, message: str, resolved_state: "GripperState",
                 events: tuple[tuple[str, str], ...]):
        super().__init__(message)
        self.resolved_state = resolved_state
        self.events = events


class ScenarioError(SimError):
    """A step failed while replaying a scenario; records where."""

    def __init__(self, step_index: int, command_index: int, cause: Exception):
        super().__init__(f"step {step_index} (command {command_index}): {cause}")
        self.step_index = step_index
        self.command_index = command_index
        self.cause = cause


@dataclass(frozen=True)
class GripperState:
    """Snapshot of the gripper between steps.

    theta_m: motor angle (rad), opening positive.
    tau_m: drive torque magnitude (N*mm).
    d_f_3s, d_f_4s: finger travel from the stopper (mm); always equal.
    theta_fb_3s, theta_fb_4s: cumulative finger-body rotations (rad).
    mode_index: current mode, 1..n_gc.
    """

    theta_m: float
    tau_m: float
    d_f_3s: float
    d_f_4s: float
    theta_fb_3s: float
    theta_fb_4s: float
    mode_index: int
    phase: Phase


@dataclass(frozen=True)
class Scenario:
    """Everything needed to replay one deterministic command sequence."""

    gears: GearGeometry
    magnet: MagnetDetent
    counts: SurfaceCounts
    commands: tuple[MotorCommand, ...] = ()
    stroke_limit: float = 40.0
    initial_position: float = 0.0
    object_contact: float | None = None
    friction_torque: float = 0.0
    step_deg: float = 0.1
    torque_step: float = 10.0
    initial_mode: int = 1
    max_steps: int = 2_000_000

    def __post_init__(self) -> None:
        if not self.step_deg > 0:
            raise ValueError("step_deg must be positive")
        if not self.torque_step > 0:
            raise ValueError("torque_step must be positive")
        if not self.stroke_limit > 0:
            raise ValueError("stroke_limit must be positive")
        if not 0 <= self.initial_position <= self.stroke_limit:
            raise ValueError("initial_position outside [0, stroke_limit]")
        if self.object_contact is not None and not (
                0 < self.object_contact <= self.stroke_limit):
            raise ValueError("object_contact outside (0, stroke_limit]")
        if self.friction_torque < 0:
            raise ValueError("friction_torque must be >= 0")
        n = gc_mode_count(self.counts)
        if not 1 <= self.initial_mode <= n:
            raise ValueError(f"initial_mode outside 1..{n}")


class TraceRow(NamedTuple):
    step: int
    theta_m: float
    tau_m: float
    d_f_3s: float
    d_f_4s: float
    theta_fb_3s: float
    theta_fb_4s: float
    f_g: float
    phase: Phase


class SimEvent(NamedTuple):
    step: int
    kind: str
    detail: str


@dataclass(frozen=True)
class SimTrace:
    rows: tuple[TraceRow, ...]
    events: tuple[SimEvent, ...]
    final_state: GripperState

    def events_of(self, kind: str) -> tuple[SimEvent, ...]:
        return tuple(e for e in self.events if e.kind == kind)


@lru_cache(maxsize=64)
def _breakaway(gears: GearGeometry, magnet: MagnetDetent) -> float:
    return breakaway_motor_torque(gears, magnet)


@lru_cache(maxsize=64)
def _peak_angle(magnet: MagnetDetent) -> float:
    return detent_peak(magnet)[0]


def _binding_side(gears: GearGeometry) -> str:
    """Finger whose detent sets the breakaway threshold (smaller torque arm)."""
    return "3s" if gears.torque_arm_3s <= gears.torque_arm_4s else "4s"


def _row(step_no: int, s: GripperState, sc: Scenario) -> TraceRow:
    f_g = s.tau_m / sc.gears.input_sprocket_radius if s.phase is Phase.GRASPING else 0.0
    return TraceRow(step_no, s.theta_m, s.tau_m, s.d_f_3s, s.d_f_4s,
                    s.theta_fb_3s, s.theta_fb_4s, f_g, s.phase)


def initial_state(scenario: Scenario) -> GripperState:
    phase = Phase.AT_STOPPER if scenario.initial_position == 0 else Phase.DETENT_ENGAGED
    return GripperState(
        theta_m=0.0, tau_m=0.0,
        d_f_3s=scenario.initial_position, d_f_4s=scenario.initial_position,
        theta_fb_3s=0.0, theta_fb_4s=0.0,
        mode_index=scenario.initial_mode, phase=phase)


def _switch_count(state: GripperState, sc: Scenario) -> int:
    """Completed switches since scenario start, from the 3S body angle."""
    return math.floor(state.theta_fb_3s / sc.counts.pitch_3s + 1e-9)


def _rotation_offset_motor(state: GripperState, sc: Scenario) -> float:
    """Motor angle consumed since the last engaged detent (0 when engaged)."""
    k = _switch_count(state, sc)
    if _binding_side(sc.gears) == "3s":
        off_body = state.theta_fb_3s - k * sc.counts.pitch_3s
        ratio = sc.gears.rotation_ratio_3s
    else:
        off_body = state.theta_fb_4s - k * sc.counts.pitch_4s
        ratio = sc.gears.rotation_ratio_4s
    return max(off_body, 0.0) / ratio


def _rotation_torque(motor_offset: float, sc: Scenario) -> float:
    """Drive torque required at a rotation offset past the engaged detent."""
    g = sc.gears
    if _binding_side(g) == "3s":
        body_angle = g.rotation_ratio_3s * motor_offset
    else:
        body_angle = g.rotation_ratio_4s * motor_offset
    arm = min(g.torque_arm_3s, g.torque_arm_4s)
    return (g.input_sprocket_radius * detent_torque(body_angle, sc.magnet) / arm
            + sc.friction_torque)


def _translate_open(state: GripperState, budget: float,
                    sc: Scenario) -> tuple[GripperState, tuple[tuple[str, str], ...]]:
    r = sc.gears.input_sprocket_radius
    to_stopper = state.d_f_3s / r
    use = min(budget, to_stopper)
    if use >= to_stopper - _EPS_LANDING:
        new_d = 0.0
        phase = Phase.AT_STOPPER
        events: tuple[tuple[str, str], ...] = ((EVENT_STOPPER_CONTACT, ""),)
    else:
        new_d = state.d_f_3s - r * use
        phase = Phase.TRANSLATING_OPEN
        events = ()
    new = replace(state, theta_m=state.theta_m + use, tau_m=0.0,
                  d_f_3s=new_d, d_f_4s=new_d, phase=phase)
    return new, events


def _translate_close(state: GripperState, budget: float, sc: Scenario,
                     position_mode: bool) -> tuple[GripperState, tuple[tuple[str, str], ...]]:
    r = sc.gears.input_sprocket_radius
    if sc.object_contact is not None:
        to_contact = (sc.object_contact - state.d_f_3s) / r
        if to_contact <= _EPS_ANGLE:
            if position_mode:
                raise UnreachableTarget(
                    "position target lies beyond the object contact; "
                    "the contact is rigid")
            # Torque mode in contact is handled by the caller.
            raise AssertionError("closing translation requested while in contact")
        use = min(budget, to_contact)
        if use >= to_contact - _EPS_LANDING:
            new_d = sc.object_contact
            phase = Phase.GRASPING
            events: tuple[tuple[str, str], ...] = ((EVENT_OBJECT_CONTACT, ""),)
        else:
            new_d = state.d_f_3s + r * use
            phase = Phase.TRANSLATING_CLOSE
            events = ()
    else:
        use = budget
        new_d = state.d_f_3s + r * use
        phase = Phase.TRANSLATING_CLOSE
        events = ()
    if new_d > sc.stroke_limit + _EPS_TRAVEL:
        raise StrokeLimitExceeded(
            f"finger travel {new_d:.6g} mm exceeds the stroke limit "
            f"{sc.stroke_limit:.6g} mm")
    new = replace(state, theta_m=state.theta_m - use, tau_m=0.0,
                  d_f_3s=new_d, d_f_4s=new_d, phase=phase)
    return new, events


def _begin_rotation(state: GripperState, tau_at_onset: float) -> tuple[GripperState, tuple[tuple[str, str], ...]]:
    """Event-only step: the detent breaks and rotation becomes active."""
    detail = f"theta_m_deg={math.degrees(state.theta_m):.6f}"
    new = replace(state, tau_m=tau_at_onset, phase=Phase.ROTATING)
    return new, ((EVENT_BREAKAWAY, detail),)


def _rotate(state: GripperState, budget: float, sc: Scenario,
            held_torque: float | None) -> tuple[GripperState, tuple[tuple[str, str], ...]]:
    """Advance an active rotation; land exactly on the next detent."""
    interval = switch_interval(sc.gears, sc.counts)
    offset = _rotation_offset_motor(state, sc)
    to_next = interval - offset
    use = min(budget, to_next)
    theta = state.theta_m + use
    if use >= to_next - _EPS_LANDING:
        k = _switch_count(state, sc) + 1
        n_gc = gc_mode_count(sc.counts)
        mode = (state.mode_index % n_gc) + 1
        new = replace(state, theta_m=theta, tau_m=0.0,
                      theta_fb_3s=k * sc.counts.pitch_3s,
                      theta_fb_4s=k * sc.counts.pitch_4s,
                      mode_index=mode, phase=Phase.DETENT_ENGAGED)
        events = ((EVENT_DETENT_REENGAGE, ""),
                  (EVENT_MODE_CHANGED, f"mode={mode}"))
        return new, events
    tau = held_torque if held_torque is not None else _rotation_torque(offset + use, sc)
    new = replace(state,
                  theta_m=theta, tau_m=tau,
                  theta_fb_3s=state.theta_fb_3s + sc.gears.rotation_ratio_3s * use,
                  theta_fb_4s=state.theta_fb_4s + sc.gears.rotation_ratio_4s * use,
                  phase=Phase.ROTATING)
    return new, ()


def _resolve_reversal(state: GripperState, sc: Scenario) -> ReversalDuringRotation:
    """Snap an in-flight rotation to the nearest stable detent and build the error."""
    g = sc.gears
    offset = _rotation_offset_motor(state, sc)
    ratio = g.rotation_ratio_3s if _binding_side(g) == "3s" else g.rotation_ratio_4s
    snap_forward = (offset > _EPS_ANGLE
                    and offset * ratio > _peak_angle(sc.magnet))
    k = _switch_count(state, sc)
    events: tuple[tuple[str, str], ...] = ()
    mode = state.mode_index
    if snap_forward:
        k += 1
        mode = (state.mode_index % gc_mode_count(sc.counts)) + 1
        events = ((EVENT_DETENT_REENGAGE, "snap_forward"),
                  (EVENT_MODE_CHANGED, f"mode={mode}"))
    elif offset > _EPS_ANGLE:
        events = ((EVENT_DETENT_REENGAGE, "snap_back"),)
    resolved = replace(state, tau_m=0.0,
                       theta_fb_3s=k * sc.counts.pitch_3s,
                       theta_fb_4s=k * sc.counts.pitch_4s,
                       mode_index=mode, phase=Phase.DETENT_ENGAGED)
    where = ("forward to the next detent" if snap_forward
             else "back to the engaged detent")
    return ReversalDuringRotation(
        "drive direction reversed while a switch was in flight; the ratchet "
        f"forbids reverse rotation (body snapped {where})",
        resolved, events)


def step(state: GripperState, cmd: MotorCommand, scenario: Scenario, *,
         angle_increment: float | None = None,
         torque_increment: float | None = None
         ) -> tuple[GripperState, tuple[tuple[str, str], ...]]:
    """Advance the state by one quasi-static increment under a command.

    Returns the new state and any (event kind, detail) pairs raised during
    the step.  Position commands consume up to one motor-angle increment of
    motion; torque commands against a rigid contact consume one torque
    increment instead.  Pure function: identical inputs give identical
    outputs.
    """
    d_inc = angle_increment if angle_increment is not None else math.radians(scenario.step_deg)
    t_inc = torque_increment if torque_increment is not None else scenario.torque_step

    if isinstance(cmd, PositionMove):
        delta = cmd.target_angle - state.theta_m
        if abs(delta) <= _EPS_LANDING:
            return state, ()
        if delta > 0:
            return _step_opening(state, min(delta, d_inc), scenario, held_torque=None)
        return _step_closing_position(state, min(-delta, d_inc), scenario)

    if cmd.direction is Direction.OPEN:
        return _step_opening_torque(state, d_inc, t_inc, scenario, cmd)
    return _step_closing_torque(state, d_inc, t_inc, scenario, cmd)


def _step_opening(state: GripperState, budget: float, sc: Scenario,
                  held_torque: float | None) -> tuple[GripperState, tuple[tuple[str, str], ...]]:
    if state.phase is Phase.ROTATING:
        return _rotate(state, budget, sc, held_torque)
    if state.d_f_3s > _EPS_TRAVEL:
        return _translate_open(state, budget, sc)
    # At the stopper: position-mode opening always commits past the detent
    # peak, so the detent breaks now (event-only step), then rotation runs.
    return _begin_rotation(state, tau_at_onset=sc.friction_torque)


def _step_closing_position(state: GripperState, budget: float,
                           sc: Scenario) -> tuple[GripperState, tuple[tuple[str, str], ...]]:
    if state.phase is Phase.ROTATING:
        raise _resolve_reversal(state, sc)
    return _translate_close(state, budget, sc, position_mode=True)


def _step_closing_torque(state: GripperState, d_inc: float, t_inc: float,
                         sc: Scenario, cmd: TorqueRamp) -> tuple[GripperState, tuple[tuple[str, str], ...]]:
    if state.phase is Phase.ROTATING:
        raise _resolve_reversal(state, sc)
    in_contact = (sc.object_contact is not None
                  and state.d_f_3s >= sc.object_contact - _EPS_TRAVEL)
    if not in_contact:
        return _translate_close(state, d_inc, sc, position_mode=False)
    tau = min(state.tau_m + t_inc, cmd.target_torque)
    return replace(state, tau_m=tau, phase=Phase.GRASPING), ()


def _step_opening_torque(state: GripperState, d_inc: float, t_inc: float,
                         sc: Scenario, cmd: TorqueRamp) -> tuple[GripperState, tuple[tuple[str, str], ...]]:
    if state.phase is Phase.ROTATING:
        return _rotate(state, d_inc, sc, held_torque=state.tau_m)
    if state.d_f_3s > _EPS_TRAVEL:
        return _translate_open(state, d_inc, sc)
    threshold = _breakaway(sc.gears, sc.magnet) + sc.friction_torque
    tau = min(state.tau_m + t_inc, cmd.target_torque)
    if tau > threshold:
        return _begin_rotation(state, tau_at_onset=tau)
    return replace(state, tau_m=tau), ()


def _command_complete(state: GripperState, cmd: MotorCommand,
                      reengaged: bool) -> bool:
    if isinstance(cmd, PositionMove):
        # The landing tolerance absorbs summation rounding over long moves.
        return abs(state.theta_m - cmd.target_angle) <= _EPS_LANDING
    if cmd.direction is Direction.CLOSE:
        return (state.phase is Phase.GRASPING
                and state.tau_m >= cmd.target_torque - _EPS_TRAVEL)
    if reengaged:
        return True
    return (state.phase is not Phase.ROTATING
            and state.tau_m >= cmd.target_torque - _EPS_TRAVEL)


def run_scenario(scenario: Scenario) -> SimTrace:
    """Replay the scenario's command sequence and record every step.

    Deterministic: the trace is a pure function of the scenario.  Errors
    raised by a step are re-raised as ScenarioError with the offending step
    and command indices.
    """
    state = initial_state(scenario)
    rows = [_row(0, state, scenario)]
    events: list[SimEvent] = []
    step_no = 0
    for ci, cmd in enumerate(scenario.commands):
        reengaged = False
        while not _command_complete(state, cmd, reengaged):
            try:
                state, evts = step(state, cmd, scenario)
            except ScenarioError:
                raise
            except SimError as exc:
                raise ScenarioError(step_no + 1, ci, exc) from exc
            step_no += 1
            if step_no > scenario.max_steps:
                raise ScenarioError(step_no, ci,
                                    SimError("max step count exceeded"))
            rows.append(_row(step_no, state, scenario))
            for kind, detail in evts:
                events.append(SimEvent(step_no, kind, detail))
                if kind == EVENT_DETENT_REENGAGE:
                    reengaged = True
    return SimTrace(rows=tuple(rows), events=tuple(events), final_state=state)


def body_torque_trace(trace: SimTrace, gears: GearGeometry) -> list[tuple[float, float]]:
    """(motor angle, 3S body torque) pairs derived from the recorded torque."""
    scale = gears.torque_arm_3s / gears.input_sprocket_radius
    return [(row.theta_m, scale * row.tau_m) for row in trace.rows]


def grasp_scenario(gears: GearGeometry, magnet: MagnetDetent, counts: SurfaceCounts, *,
                   target_force: float, gap: float, stroke_limit: float = 40.0,
                   step_deg: float = 0.1, torque_step: float = 10.0,
                   friction_torque: float = 0.0) -> Scenario:
    """Close on an object a given travel away and ramp to a grasp force."""
    return Scenario(gears=gears, magnet=magnet, counts=counts,
                    commands=(grasp_command(target_force, gears),),
                    stroke_limit=stroke_limit, initial_position=0.0,
                    object_contact=gap, friction_torque=friction_torque,
                    step_deg=step_deg, torque_step=torque_step)


def switch_scenario(gears: GearGeometry, magnet: MagnetDetent, counts: SurfaceCounts, *,
                    from_mode: int, to_mode: int, gap: float = 3.0,
                    stroke_limit: float = 40.0, step_deg: float = 0.1,
                    friction_torque: float = 0.0) -> tuple[Scenario, ControllerState]:
    """Open from a small gap and switch modes; also returns the controller state.

    The fully-open motor reference is the angle at which the initial gap has
    been traversed.
    """
    open_ref = gap / gears.input_sprocket_radius
    cs = ControllerState(open_reference_angle=open_ref, k_now=from_mode,
                         n_gc=gc_mode_count(counts),
                         switch_interval=switch_interval(gears, counts))
    move, cs_after = switch_command(cs, to_mode)
    scenario = Scenario(gears=gears, magnet=magnet, counts=counts,
                        commands=(move,), stroke_limit=stroke_limit,
                        initial_position=gap, friction_torque=friction_torque,
                        step_deg=step_deg, initial_mode=from_mode)
    return scenario, cs_after


TRACE_HEADER = ["step", "theta_m_deg", "tau_m_Nmm", "d_f3S_mm", "d_f4S_mm",
                "theta_FB3S_deg", "theta_FB4S_deg", "f_g_N", "phase"]
EVENTS_HEADER = ["step", "event", "detail"]


def write_trace_csv(trace: SimTrace, stream) -> None:
    """Write the trace rows as CSV (angles in degrees, torques in N*mm)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for r in trace.rows:
        writer.writerow([r.step, repr(math.degrees(r.theta_m)), repr(r.tau_m),
                         repr(r.d_f_3s), repr(r.d_f_4s),
                         repr(math.degrees(r.theta_fb_3s)),
                         repr(math.degrees(r.theta_fb_4s)),
                         repr(r.f_g), r.phase.value])


def write_events_csv(trace: SimTrace, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(EVENTS_HEADER)
    for e in trace.events:
        writer.writerow([e.step, e.kind, e.detail])
