"""The fixed set of named experiments."""

from __future__ import annotations

import math
import zlib

import numpy as np

from .config import MaskChannel, Push, ScenarioConfig, SetComOffset, SetMass, Terrain

NOMINAL_TORSO_MASS = 10.33
PUSH_TIME = 2.5


def derive_seed(master_seed: int, name: str) -> int:
    return int(np.random.SeedSequence([master_seed, zlib.crc32(name.encode())]).generate_state(1)[0])


def baseline_config(seed: int = 0, duration: float = 60.0, adaptive: bool = False) -> ScenarioConfig:
    """Unperturbed robot walking at 0.5 m/s."""
    return ScenarioConfig(name="nominal", seed=seed, duration=duration, adaptive_enabled=adaptive)


def scenario_catalog(master_seed: int = 0) -> dict[str, ScenarioConfig]:
    heavy_offset = (SetMass(0.0, NOMINAL_TORSO_MASS + 5.0), SetComOffset(0.0, 0.10))
    specs = [
        ("mass-15kg", dict(duration=90.0, events=(SetMass(0.0, 15.0),))),
        ("mass-20kg", dict(duration=90.0, events=(SetMass(0.0, 20.0),))),
        ("mass-23kg", dict(duration=90.0, events=(SetMass(0.0, 23.0),))),
        ("com+0.05", dict(duration=90.0, events=(SetComOffset(0.0, 0.05),))),
        ("com+0.10", dict(duration=90.0, events=(SetComOffset(0.0, 0.10),))),
        ("com-0.10", dict(duration=90.0, events=(SetComOffset(0.0, -0.10),))),
        ("compare-baseline", dict(duration=60.0, events=heavy_offset, compare=True)),
        ("diag-(0.4,-0.2)", dict(duration=60.0, velocity=((0.0, 0.4, -0.2),), events=heavy_offset)),
        ("diag-(0.6,0.1)", dict(duration=60.0, velocity=((0.0, 0.6, 0.1),), events=heavy_offset)),
        ("push-fwd-30N-0.1s", dict(duration=20.0, events=(Push(PUSH_TIME, 30.0, 0.1, "+x"),))),
        ("push-bwd-25N-0.1s", dict(duration=20.0, events=(Push(PUSH_TIME, 25.0, 0.1, "-x"),))),
        # per-step slopes this steep exceed what the reduced model can recover from
        ("terrain-20deg", dict(duration=30.0, events=(Terrain(0.0, math.radians(20.0)),), must_not_fall=False)),
        ("redundancy-mask-hip", dict(duration=90.0, events=heavy_offset + (MaskChannel(0.0, "x", 0),))),
    ]
    return {
        name: ScenarioConfig(name=name, seed=derive_seed(master_seed, name), **kw) for name, kw in specs
    }
