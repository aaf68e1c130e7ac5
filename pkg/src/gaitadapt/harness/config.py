"""Declarative scenario description."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from ..biped_model import MAX_SLOPE, ModelParams
from ..nominal_controller import MAX_SPEED, TorsoGains
from ..regulators import RegulatorGains

NETWORK_NAMES = ("x", "y", "phi")
NETWORK_OUTPUTS = {"x": 2, "y": 2, "phi": 1}
PUSH_DIRECTIONS = {"+x": (1.0, 0.0), "-x": (-1.0, 0.0), "+y": (0.0, 1.0), "-y": (0.0, -1.0)}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SetMass:
    t: float
    mass: float


@dataclass(frozen=True)
class SetComOffset:
    """Shift the torso COM by ``offset`` from its nominal position."""

    t: float
    offset: float


@dataclass(frozen=True)
class Push:
    t: float
    force: float
    duration: float
    direction: str = "+x"


@dataclass(frozen=True)
class Terrain:
    t: float
    max_slope: float


@dataclass(frozen=True)
class MaskChannel:
    t: float
    network: str
    channel: int
    masked: bool = True


Event = Union[SetMass, SetComOffset, Push, Terrain, MaskChannel]


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    seed: int = 0
    duration: float = 30.0
    dt: float = 1e-3
    velocity: tuple[tuple[float, float, float], ...] = ((0.0, 0.5, 0.0),)
    events: tuple[Event, ...] = ()
    adaptive_enabled: bool = True
    gains: RegulatorGains = field(default_factory=RegulatorGains)
    torso_gains: TorsoGains = field(default_factory=TorsoGains)
    model: ModelParams = field(default_factory=ModelParams)
    gamma: float = 1e-4
    n_hidden: int = 1000
    update_per_tick: bool = False
    must_not_fall: bool = True
    compare: bool = False

    def __post_init__(self):
        object.__setattr__(self, "velocity", tuple(tuple(float(v) for v in seg) for seg in self.velocity))
        object.__setattr__(self, "events", tuple(self.events))
        self.validate()

    def validate(self) -> None:
        if not self.name:
            raise ConfigError("scenario needs a name")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not self.duration > 0:
            raise ConfigError(f"duration must be positive, got {self.duration}")
        steps = self.model.t_step / self.dt
        if abs(steps - round(steps)) > 1e-6 or round(steps) < 2:
            raise ConfigError(f"t_step={self.model.t_step} is not a whole number (>=2) of dt={self.dt} ticks")
        if not self.velocity:
            raise ConfigError("velocity profile is empty")
        if self.velocity[0][0] != 0.0:
            raise ConfigError("velocity profile must start at t=0")
        times = [seg[0] for seg in self.velocity]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("velocity segments must have strictly increasing start times")
        for seg in self.velocity:
            if len(seg) != 3:
                raise ConfigError(f"velocity segment needs (t, v_x, v_y), got {seg}")
            if any(abs(v) > MAX_SPEED for v in seg[1:]):
                raise ConfigError(f"desired speed in {seg} exceeds {MAX_SPEED} m/s")
        ev_times = [ev.t for ev in self.events]
        if any(b < a for a, b in zip(ev_times, ev_times[1:])):
            raise ConfigError("events must be sorted by time")
        if ev_times and (ev_times[0] < 0 or ev_times[-1] > self.duration):
            raise ConfigError("event times must lie within [0, duration]")
        if times[-1] > self.duration:
            raise ConfigError("velocity segment starts after the end of the run")
        for ev in self.events:
            _validate_event(ev)
        if self.n_hidden < 1:
            raise ConfigError(f"n_hidden must be >= 1, got {self.n_hidden}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ConfigError(f"gamma must be finite and non-negative, got {self.gamma}")


def _validate_event(ev: Event) -> None:
    if isinstance(ev, SetMass):
        if not ev.mass > 0:
            raise ConfigError(f"mass must be positive: {ev}")
    elif isinstance(ev, Push):
        if ev.direction not in PUSH_DIRECTIONS:
            raise ConfigError(f"push direction must be one of {sorted(PUSH_DIRECTIONS)}: {ev}")
        if not ev.duration > 0:
            raise ConfigError(f"push duration must be positive: {ev}")
    elif isinstance(ev, Terrain):
        if not 0 <= ev.max_slope <= MAX_SLOPE:
            raise ConfigError(f"terrain slope must lie in [0, 25 deg]: {ev}")
    elif isinstance(ev, MaskChannel):
        if ev.network not in NETWORK_OUTPUTS:
            raise ConfigError(f"unknown network {ev.network!r}; expected one of {NETWORK_NAMES}")
        if not 0 <= ev.channel < NETWORK_OUTPUTS[ev.network]:
            raise ConfigError(f"network {ev.network!r} has no channel {ev.channel}")
    elif not isinstance(ev, SetComOffset):
        raise ConfigError(f"unknown event {ev!r}")
