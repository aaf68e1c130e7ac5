from .catalog import baseline_config, derive_seed, scenario_catalog
from .config import (
    ConfigError,
    MaskChannel,
    Push,
    ScenarioConfig,
    SetComOffset,
    SetMass,
    Terrain,
)
from .engine import STEP_COLUMNS, TICK_COLUMNS, StepRecord, Trace, mid_step_velocity, simulate
from .metrics import Metrics, compute_metrics


def run_scenario(cfg: ScenarioConfig) -> tuple[Trace, Metrics]:
    trace = simulate(cfg)
    return trace, compute_metrics(trace, cfg)


__all__ = [
    "ConfigError",
    "MaskChannel",
    "Metrics",
    "Push",
    "STEP_COLUMNS",
    "ScenarioConfig",
    "SetComOffset",
    "SetMass",
    "StepRecord",
    "TICK_COLUMNS",
    "Terrain",
    "Trace",
    "baseline_config",
    "compute_metrics",
    "derive_seed",
    "mid_step_velocity",
    "run_scenario",
    "scenario_catalog",
    "simulate",
]
