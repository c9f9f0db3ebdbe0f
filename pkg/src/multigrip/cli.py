"""Command-line interface.

Angles are degrees and torques N*mm at this boundary; conversion to the
library's radians happens here.  Subcommands write CSV to --out when given,
otherwise to stdout.  Exit status is 0 on success and nonzero with a
one-line diagnostic on stderr otherwise.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Sequence

from . import grasp, mechanics, modes, planner, sim
from .config import (ConfigError, RunConfig, default_config, load_config,
                     set_config_value)
from .objects import ObjectFileError, load_object_file

__all__ = ["dispatch", "main"]


class CliError(Exception):
    pass


def _load(args) -> RunConfig:
    if args.config:
        return load_config(args.config)
    return default_config()


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_validate_gears(args) -> int:
    cfg = _load(args)
    violation = mechanics.validate_antipodal_gearing(cfg.gears, cfg.counts)
    if violation is not None:
        raise CliError(str(violation))
    interval = mechanics.switch_interval(cfg.gears, cfg.counts)
    lines = [
        f"rotation_ratio_3s={cfg.gears.rotation_ratio_3s:.9g}",
        f"rotation_ratio_4s={cfg.gears.rotation_ratio_4s:.9g}",
        f"torque_arm_3s_mm={cfg.gears.torque_arm_3s:.9g}",
        f"torque_arm_4s_mm={cfg.gears.torque_arm_4s:.9g}",
        f"delta_theta_sw_deg={math.degrees(interval):g}",
        f"n_GC={mechanics.gc_mode_count(cfg.counts)}",
    ]
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_modes(args) -> int:
    cfg = _load(args)
    table = modes.build_mode_table(cfg.counts, cfg.order_3s, cfg.order_4s)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["mode", "label", "surface_3s", "surface_4s"])
    for k in range(1, len(table) + 1):
        s3, s4 = table.entry(k)
        writer.writerow([k, table.label(k), str(s3), str(s4)])
    pairs = sorted(modes.distinct_shape_pairs(table),
                   key=lambda p: (str(p[0]), str(p[1])))
    buf.write(f"distinct_pairs={len(pairs)}\n")
    for a, b in pairs:
        buf.write(f"{a} | {b}\n")
    _emit(args, buf.getvalue())
    return 0


def _write_trace(args, trace: sim.SimTrace) -> None:
    buf = io.StringIO()
    sim.write_trace_csv(trace, buf)
    _emit(args, buf.getvalue())
    if getattr(args, "events", None):
        with open(args.events, "w", encoding="utf-8", newline="") as fh:
            sim.write_events_csv(trace, fh)


def _cmd_simulate_grasp(args) -> int:
    cfg = _load(args)
    if args.gap > cfg.stroke_limit:
        raise CliError(f"gap {args.gap:g} mm exceeds the stroke limit "
                       f"{cfg.stroke_limit:g} mm")
    scenario = sim.grasp_scenario(
        cfg.gears, cfg.magnet, cfg.counts,
        target_force=args.force, gap=args.gap,
        stroke_limit=cfg.stroke_limit, step_deg=cfg.step_deg,
        torque_step=cfg.torque_step, friction_torque=cfg.friction_torque)
    trace = sim.run_scenario(scenario)
    _write_trace(args, trace)
    final = trace.rows[-1]
    print(f"final_f_g_N={final.f_g:g} final_tau_m_Nmm={final.tau_m:g} "
          f"steps={final.step}", file=sys.stderr)
    if args.object:
        desc = load_object_file(args.object)
        table = modes.build_mode_table(cfg.counts, cfg.order_3s, cfg.order_4s)
        result = grasp.classify_grasp(
            desc.spec, table.entry(args.mode), face_width=cfg.face_width,
            thin_threshold=cfg.thin_object, stroke=cfg.stroke_limit)
        print(f"classification={result.outcome.value}", file=sys.stderr)
    return 0


def _cmd_simulate_switch(args) -> int:
    cfg = _load(args)
    scenario, _ = sim.switch_scenario(
        cfg.gears, cfg.magnet, cfg.counts,
        from_mode=args.from_mode, to_mode=args.to_mode, gap=args.gap,
        stroke_limit=cfg.stroke_limit, step_deg=cfg.step_deg,
        friction_torque=cfg.friction_torque)
    trace = sim.run_scenario(scenario)
    _write_trace(args, trace)
    changes = trace.events_of(sim.EVENT_MODE_CHANGED)
    open_ref = args.gap / cfg.gears.input_sprocket_radius
    switch_travel = math.degrees(trace.rows[-1].theta_m - open_ref)
    print(f"mode_changes={len(changes)} final_mode={trace.final_state.mode_index} "
          f"switch_travel_deg={switch_travel:g}", file=sys.stderr)
    return 0


def _cmd_plan(args) -> int:
    cfg = _load(args)
    desc = load_object_file(args.object)
    table = modes.build_mode_table(cfg.counts, cfg.order_3s, cfg.order_4s)
    faces = planner.faces_from_description(desc)
    interval = mechanics.switch_interval(cfg.gears, cfg.counts)
    result = planner.select_mode(
        faces, args.current_mode, table, interval,
        planner.PlannerThresholds(small_object_height=cfg.small_object_height))
    lines = [
        f"k_goal={result.k_goal}",
        f"rotation_deg={math.degrees(result.rotation):g}",
        f"fallback_used={str(result.fallback_used).lower()}",
    ]
    lines += [f"rationale: {r}" for r in result.rationale]
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_classify(args) -> int:
    cfg = _load(args)
    desc = load_object_file(args.object)
    table = modes.build_mode_table(cfg.counts, cfg.order_3s, cfg.order_4s)
    result = grasp.classify_grasp(
        desc.spec, table.entry(args.mode), face_width=cfg.face_width,
        thin_threshold=cfg.thin_object, stroke=cfg.stroke_limit)
    report = (f"classification={result.outcome.value} "
              f"contacts={len(result.contacts)} "
              f"posture_uncertain={str(result.posture_uncertain).lower()}")
    if result.reason:
        report += f" reason={result.reason!r}"
    _emit(args, report + "\n")
    if args.contacts_out:
        with open(args.contacts_out, "w", encoding="utf-8", newline="") as fh:
            grasp.write_contacts_csv(result.contacts, fh)
    return 0


def _parse_range(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise CliError("--range expects start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise CliError(f"non-numeric range component in {spec!r}") from None
    if step <= 0:
        raise CliError("range step must be positive")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-12 * max(abs(stop), 1.0):
            break
        values.append(v)
        k += 1
    if not values:
        raise CliError(f"range {spec!r} contains no points")
    return values


_METRIC_COLUMNS = {
    "peak-detent": ["detent_peak_theta_deg", "detent_peak_torque_nmm"],
    "breakaway": ["breakaway_torque_nmm"],
    "switch-interval": ["switch_interval_deg"],
}


def _metric_values(metric: str, cfg: RunConfig) -> list[float]:
    if metric == "peak-detent":
        angle, torque = mechanics.detent_peak(cfg.magnet)
        return [math.degrees(angle), torque]
    if metric == "breakaway":
        return [mechanics.breakaway_motor_torque(cfg.gears, cfg.magnet)]
    return [math.degrees(mechanics.switch_interval(cfg.gears, cfg.counts))]


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    values = _parse_range(args.range)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", args.param, *_METRIC_COLUMNS[args.metric]])
    for i, value in enumerate(values):
        point = set_config_value(cfg, args.param, value)
        writer.writerow([i, repr(value),
                         *[repr(m) for m in _metric_values(args.metric, point)]])
    _emit(args, buf.getvalue())
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multigrip",
        description="Simulate, control and plan grasps for a single-motor "
                    "multi-surface gripper.")
    parser.add_argument("--config", help="configuration file (defaults built in)")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate-gears", help="check gear ratios and print "
                                              "the derived switching numbers")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_validate_gears)

    p = sub.add_parser("modes", help="print the mode table and the collapsed "
                                     "unordered surface pairs")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_modes)

    p = sub.add_parser("simulate", help="run a scenario and emit its trace CSV")
    sim_sub = p.add_subparsers(dest="scenario", required=True)

    g = sim_sub.add_parser("grasp", help="close on an object and ramp to a force")
    g.add_argument("--force", type=float, required=True, help="target grasp force [N]")
    g.add_argument("--gap", type=float, required=True,
                   help="finger travel to object contact [mm]")
    g.add_argument("--object", help="object file to classify after grasping")
    g.add_argument("--mode", type=int, default=1, help="mode for classification")
    g.add_argument("--out")
    g.add_argument("--events", help="sidecar CSV for events")
    g.set_defaults(func=_cmd_simulate_grasp)

    s = sim_sub.add_parser("switch", help="open fully and rotate to another mode")
    s.add_argument("--from", dest="from_mode", type=int, required=True)
    s.add_argument("--to", dest="to_mode", type=int, required=True)
    s.add_argument("--gap", type=float, default=3.0,
                   help="initial distance from the stopper [mm]")
    s.add_argument("--out")
    s.add_argument("--events")
    s.set_defaults(func=_cmd_simulate_switch)

    p = sub.add_parser("plan", help="select the mode for an object")
    p.add_argument("--object", required=True)
    p.add_argument("--current-mode", dest="current_mode", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("classify", help="classify the grasp of an object in a mode")
    p.add_argument("--object", required=True)
    p.add_argument("--mode", type=int, required=True)
    p.add_argument("--contacts-out", dest="contacts_out")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("sweep", help="evaluate a metric over a parameter grid")
    p.add_argument("--param", required=True,
                   help="configuration key as section.key")
    p.add_argument("--range", required=True, help="start:stop:step")
    p.add_argument("--metric", required=True, choices=sorted(_METRIC_COLUMNS))
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sweep)

    return parser


def dispatch(argv: Sequence[str]) -> int:
    """Run one CLI invocation; returns the process exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CliError, ConfigError, ObjectFileError, ValueError,
            sim.SimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
