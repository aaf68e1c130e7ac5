"""Sectioned ``key = value`` scenario files.

Lists are written as repeated keys, so the ``[velocity]`` and ``[events]``
sections keep their entries in file order::

    [scenario]
    name = compare-baseline
    seed = 42
    duration = 60.0

    [velocity]
    segment = 0.0, 0.5, 0.0

    [events]
    set_mass = 0.0, 15.33
    set_com_offset = 0.0, 0.1
    push = 2.5, 30.0, 0.1, +x
    terrain = 0.0, 0.349
    mask_channel = 0.0, x, 0

``[gains]``, ``[torso_gains]`` and ``[model]`` override individual fields of
the corresponding parameter blocks.
"""

from __future__ import annotations

import dataclasses
import re
from pathlib import Path

from ..biped_model import ModelParams
from ..harness.config import (
    ConfigError,
    MaskChannel,
    Push,
    ScenarioConfig,
    SetComOffset,
    SetMass,
    Terrain,
)
from ..nominal_controller import TorsoGains
from ..regulators import RegulatorGains

_BLOCKS = {"gains": RegulatorGains, "torso_gains": TorsoGains, "model": ModelParams}
_SCENARIO_KEYS = {
    "name": str,
    "seed": int,
    "duration": float,
    "dt": float,
    "adaptive": "bool",
    "gamma": float,
    "n_hidden": int,
    "update_per_tick": "bool",
    "must_not_fall": "bool",
    "compare": "bool",
}
_FIELD_OF = {"adaptive": "adaptive_enabled"}
_INLINE_COMMENT = re.compile(r"\s[#;]")
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_sections(text: str, source: str = "<config>") -> dict[str, list[tuple[str, str, int]]]:
    """Split text into sections of ``(key, value, line)`` entries in order."""
    sections: dict[str, list[tuple[str, str, int]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        # comments start a line or follow whitespace
        line = _INLINE_COMMENT.split(raw, 1)[0].strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in sections:
                raise ConfigError(f"{source}:{lineno}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise ConfigError(f"{source}:{lineno}: entry outside of any section")
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        sections[current].append((key.strip(), value.strip(), lineno))
    return sections


def _bool(value: str, where: str) -> bool:
    v = value.lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ConfigError(f"{where}: expected a boolean, got {value!r}")


def _convert(kind, value: str, where: str):
    if kind == "bool":
        return _bool(value, where)
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"{where}: cannot read {value!r} as {kind.__name__}") from None


def _fields(value: str, n: int, where: str) -> list[str]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != n:
        raise ConfigError(f"{where}: expected {n} comma-separated values, got {len(parts)}")
    return parts


def _floats(parts: list[str], where: str) -> list[float]:
    return [_convert(float, p, where) for p in parts]


def _event(key: str, value: str, where: str):
    if key == "set_mass":
        return SetMass(*_floats(_fields(value, 2, where), where))
    if key == "set_com_offset":
        return SetComOffset(*_floats(_fields(value, 2, where), where))
    if key == "terrain":
        return Terrain(*_floats(_fields(value, 2, where), where))
    if key == "push":
        t, force, dur, direction = _fields(value, 4, where)
        return Push(*_floats([t, force, dur], where), direction=direction)
    if key == "mask_channel":
        t, net, ch = _fields(value, 3, where)
        return MaskChannel(_convert(float, t, where), net, _convert(int, ch, where))
    raise ConfigError(f"{where}: unknown event {key!r}")


def _block(cls, entries, source: str, section: str):
    names = {f.name for f in dataclasses.fields(cls)}
    kw = {}
    for key, value, lineno in entries:
        where = f"{source}:{lineno}"
        if key not in names:
            raise ConfigError(f"{where}: unknown key {key!r} in [{section}]")
        kw[key] = _convert(float, value, where)
    try:
        return cls(**kw)
    except ValueError as exc:
        raise ConfigError(f"{source}: [{section}] {exc}") from None


def config_from_text(text: str, source: str = "<config>") -> ScenarioConfig:
    sections = parse_sections(text, source)
    unknown = set(sections) - {"scenario", "velocity", "events"} - set(_BLOCKS)
    if unknown:
        raise ConfigError(f"{source}: unknown section(s) {sorted(unknown)}")
    if "scenario" not in sections:
        raise ConfigError(f"{source}: missing [scenario] section")

    kw: dict = {}
    for key, value, lineno in sections["scenario"]:
        where = f"{source}:{lineno}"
        if key not in _SCENARIO_KEYS:
            raise ConfigError(f"{where}: unknown key {key!r} in [scenario]")
        kw[_FIELD_OF.get(key, key)] = _convert(_SCENARIO_KEYS[key], value, where)
    if "name" not in kw:
        raise ConfigError(f"{source}: [scenario] needs a name")

    if "velocity" in sections:
        segs = []
        for key, value, lineno in sections["velocity"]:
            where = f"{source}:{lineno}"
            if key != "segment":
                raise ConfigError(f"{where}: unknown key {key!r} in [velocity]")
            segs.append(tuple(_floats(_fields(value, 3, where), where)))
        kw["velocity"] = tuple(segs)
    kw["events"] = tuple(
        _event(key, value, f"{source}:{lineno}") for key, value, lineno in sections.get("events", [])
    )
    for section, cls in _BLOCKS.items():
        if section in sections:
            kw[section] = _block(cls, sections[section], source, section)
    try:
        return ScenarioConfig(**kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return config_from_text(text, str(path))


def _num(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def _event_line(ev) -> str:
    if isinstance(ev, SetMass):
        return f"set_mass = {_num(ev.t)}, {_num(ev.mass)}"
    if isinstance(ev, SetComOffset):
        return f"set_com_offset = {_num(ev.t)}, {_num(ev.offset)}"
    if isinstance(ev, Terrain):
        return f"terrain = {_num(ev.t)}, {_num(ev.max_slope)}"
    if isinstance(ev, Push):
        return f"push = {_num(ev.t)}, {_num(ev.force)}, {_num(ev.duration)}, {ev.direction}"
    if isinstance(ev, MaskChannel):
        if not ev.masked:
            raise ConfigError("unmasking events have no file representation")
        return f"mask_channel = {_num(ev.t)}, {ev.network}, {ev.channel}"
    raise ConfigError(f"unknown event {ev!r}")


def config_to_text(cfg: ScenarioConfig) -> str:
    """Inverse of :func:`config_from_text`; floats are written exactly."""
    onoff = {True: "on", False: "off"}
    lines = [
        "[scenario]",
        f"name = {cfg.name}",
        f"seed = {cfg.seed}",
        f"duration = {_num(cfg.duration)}",
        f"dt = {_num(cfg.dt)}",
        f"adaptive = {onoff[cfg.adaptive_enabled]}",
        f"gamma = {_num(cfg.gamma)}",
        f"n_hidden = {cfg.n_hidden}",
        f"update_per_tick = {onoff[cfg.update_per_tick]}",
        f"must_not_fall = {onoff[cfg.must_not_fall]}",
        f"compare = {onoff[cfg.compare]}",
        "",
        "[velocity]",
    ]
    lines += [f"segment = {', '.join(_num(v) for v in seg)}" for seg in cfg.velocity]
    lines += ["", "[events]"]
    lines += [_event_line(ev) for ev in cfg.events]
    for section in _BLOCKS:
        lines += ["", f"[{section}]"]
        block = getattr(cfg, section)
        lines += [f"{f.name} = {_num(float(getattr(block, f.name)))}" for f in dataclasses.fields(block)]
    return "\n".join(lines) + "\n"
