"""Run configuration: sectioned key=value files with strict validation.

Format: `[section]` headers with `key = value` lines; `#` starts a
comment.  Sections are [gears], [detent], [surfaces], [planner] and [sim].
Unknown sections or keys are rejected, and every error carries the line
number.  Values use a plain decimal point regardless of locale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .mechanics import (GearGeometry, MagnetDetent, SurfaceCounts,
                        validate_antipodal_gearing)
from .modes import SurfaceKind, SurfaceShape, default_order_3s, default_order_4s

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config",
           "default_config", "set_config_value", "SWEEPABLE_PARAMS"]


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters for the CLI and scenario builders."""

    gears: GearGeometry
    magnet: MagnetDetent
    counts: SurfaceCounts
    order_3s: tuple[SurfaceShape, ...]
    order_4s: tuple[SurfaceShape, ...]
    face_radius: float = 10.0
    face_width: float = 20.0
    stroke_limit: float = 40.0
    step_deg: float = 0.1
    friction_torque: float = 0.0
    torque_step: float = 10.0
    small_object_height: float = 10.0
    thin_object: float = 3.0

    def __post_init__(self) -> None:
        violation = validate_antipodal_gearing(self.gears, self.counts)
        if violation is not None:
            raise ConfigError(str(violation))
        if len(self.order_3s) != self.counts.n_3s:
            raise ConfigError(
                f"surface order for the 3S finger has {len(self.order_3s)} "
                f"entries, expected {self.counts.n_3s}")
        if len(self.order_4s) != self.counts.n_4s:
            raise ConfigError(
                f"surface order for the 4S finger has {len(self.order_4s)} "
                f"entries, expected {self.counts.n_4s}")


_GEAR_KEYS = {
    "input_sprocket_radius_mm": "input_sprocket_radius",
    "drive_sprocket_radius_mm": "shaft_sprocket_radius",
    "shaft_gear_radius_3s_mm": "shaft_gear_radius_3s",
    "shaft_gear_radius_4s_mm": "shaft_gear_radius_4s",
    "body_gear_radius_3s_mm": "body_gear_radius_3s",
    "body_gear_radius_4s_mm": "body_gear_radius_4s",
}
_DETENT_KEYS = {
    "magnet_coefficient_nmm2": "magnet_coefficient",
    "magnet_circle_radius_mm": "circle_radius",
    "magnet_gap_mm": "nominal_gap",
}
_SURFACE_KEYS = {"count_3s", "count_4s", "order_3s", "order_4s",
                 "face_radius_mm", "face_width_mm"}
_PLANNER_KEYS = {"small_object_height_mm", "thin_object_mm"}
_SIM_KEYS = {"stroke_limit_mm", "step_deg", "friction_torque_nmm",
             "torque_step_nmm"}
_SECTIONS = {
    "gears": set(_GEAR_KEYS),
    "detent": set(_DETENT_KEYS),
    "surfaces": _SURFACE_KEYS,
    "planner": _PLANNER_KEYS,
    "sim": _SIM_KEYS,
}

_SURFACE_NAMES = {
    "flat": SurfaceKind.FLAT,
    "convex": SurfaceKind.CONVEX,
    "concave": SurfaceKind.CONCAVE,
    "deformable": SurfaceKind.DEFORMABLE_FLAT,
}

# Default magnet coefficient from the prototype magnet datasheet model.
DEFAULT_DETENT_VALUES = {
    "magnet_coefficient_nmm2": 1.07e-5,
    "magnet_circle_radius_mm": 14.0,
    "magnet_gap_mm": 1.0,
}


def default_config() -> RunConfig:
    return RunConfig(
        gears=GearGeometry(20.0, 15.0, 10.0, 7.5, 12.0, 12.0),
        magnet=MagnetDetent(1.07e-5, 14.0, 1.0),
        counts=SurfaceCounts(3, 4),
        order_3s=default_order_3s(10.0),
        order_4s=default_order_4s(10.0),
    )


def _parse_sections(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in _SECTIONS:
                raise ConfigError(f"unknown section [{current}]", lineno)
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", lineno)
        if current is None:
            raise ConfigError("key outside of any [section]", lineno)
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if key not in _SECTIONS[current]:
            raise ConfigError(f"unknown key {key!r} in [{current}]", lineno)
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        sections[current][key] = (value.strip(), lineno)
    return sections


def _number(section: dict[str, tuple[str, int]], key: str,
            default: float | None = None) -> float:
    if key not in section:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value, lineno = section[key]
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"non-numeric value for {key}: {value!r}",
                          lineno) from None


def _integer(section: dict[str, tuple[str, int]], key: str, default: int) -> int:
    if key not in section:
        return default
    value, lineno = section[key]
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"non-integer value for {key}: {value!r}",
                          lineno) from None


def _surface_order(section, key: str, face_radius: float,
                   default: tuple[SurfaceShape, ...]) -> tuple[SurfaceShape, ...]:
    if key not in section:
        return default
    value, lineno = section[key]
    shapes = []
    for name in value.split(","):
        name = name.strip().lower()
        if name not in _SURFACE_NAMES:
            raise ConfigError(f"unknown surface {name!r} in {key}", lineno)
        kind = _SURFACE_NAMES[name]
        radius = face_radius if kind in (SurfaceKind.CONVEX, SurfaceKind.CONCAVE) else None
        shapes.append(SurfaceShape(kind, radius))
    return tuple(shapes)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a configuration file."""
    sections = _parse_sections(text)
    gears_sec = sections.get("gears", {})
    detent_sec = sections.get("detent", {})
    surf_sec = sections.get("surfaces", {})
    plan_sec = sections.get("planner", {})
    sim_sec = sections.get("sim", {})

    gear_kwargs = {attr: _number(gears_sec, key)
                   for key, attr in _GEAR_KEYS.items()}
    try:
        gears = GearGeometry(**gear_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    detent_kwargs = {attr: _number(detent_sec, key, DEFAULT_DETENT_VALUES[key])
                     for key, attr in _DETENT_KEYS.items()}
    try:
        magnet = MagnetDetent(**detent_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    try:
        counts = SurfaceCounts(n_3s=_integer(surf_sec, "count_3s", 3),
                               n_4s=_integer(surf_sec, "count_4s", 4))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    face_radius = _number(surf_sec, "face_radius_mm", 10.0)
    order_3s = _surface_order(surf_sec, "order_3s", face_radius,
                              default_order_3s(face_radius) if counts.n_3s == 3 else ())
    order_4s = _surface_order(surf_sec, "order_4s", face_radius,
                              default_order_4s(face_radius) if counts.n_4s == 4 else ())
    if not order_3s or not order_4s:
        raise ConfigError("non-default surface counts need explicit "
                          "order_3s/order_4s lists")

    return RunConfig(
        gears=gears, magnet=magnet, counts=counts,
        order_3s=order_3s, order_4s=order_4s,
        face_radius=face_radius,
        face_width=_number(surf_sec, "face_width_mm", 20.0),
        stroke_limit=_number(sim_sec, "stroke_limit_mm", 40.0),
        step_deg=_number(sim_sec, "step_deg", 0.1),
        friction_torque=_number(sim_sec, "friction_torque_nmm", 0.0),
        torque_step=_number(sim_sec, "torque_step_nmm", 10.0),
        small_object_height=_number(plan_sec, "small_object_height_mm", 10.0),
        thin_object=_number(plan_sec, "thin_object_mm", 3.0),
    )


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# Parameters the sweep subcommand may vary, as section.key names.
SWEEPABLE_PARAMS = {
    "detent.magnet_coefficient_nmm2": ("magnet", "magnet_coefficient"),
    "detent.magnet_circle_radius_mm": ("magnet", "circle_radius"),
    "detent.magnet_gap_mm": ("magnet", "nominal_gap"),
    "gears.input_sprocket_radius_mm": ("gears", "input_sprocket_radius"),
    "gears.drive_sprocket_radius_mm": ("gears", "shaft_sprocket_radius"),
    "sim.friction_torque_nmm": (None, "friction_torque"),
}


def set_config_value(config: RunConfig, param: str, value: float) -> RunConfig:
    """Return a copy of the config with one sweepable parameter replaced."""
    if param not in SWEEPABLE_PARAMS:
        raise ConfigError(
            f"unknown sweep parameter {param!r}; supported: "
            + ", ".join(sorted(SWEEPABLE_PARAMS)))
    group, attr = SWEEPABLE_PARAMS[param]
    if not math.isfinite(value):
        raise ConfigError(f"non-finite value for {param}")
    if group is None:
        return replace(config, **{attr: value})
    nested = replace(getattr(config, group), **{attr: value})
    return replace(config, **{group: nested})
