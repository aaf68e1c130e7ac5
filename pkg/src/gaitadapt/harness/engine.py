"""Closed-loop scenario execution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ..adaptive_net import AdaptiveNetwork, NetworkInput
from ..biped_model import (
    Disturbance,
    ModelParams,
    NumericalError,
    PlantCommand,
    RobotState,
    Side,
    integrate_step,
    is_fallen,
    realized_landing,
    step_transition,
)
from ..nominal_controller import (
    ZERO_DELTA,
    inner_loop_torque,
    landing_command,
    lateral_step,
    nominal_gait_update,
    periodic_orbit_start,
    refit_swing,
    torso_feedforward,
)
from ..regulators import Feedforward, Measurement, Reference, RegulatorState, assemble_delta_y
from .config import (
    NETWORK_NAMES,
    NETWORK_OUTPUTS,
    PUSH_DIRECTIONS,
    MaskChannel,
    Push,
    ScenarioConfig,
    SetComOffset,
    SetMass,
    Terrain,
)

TICK_COLUMNS = (
    "t", "k", "tau", "x", "y", "vx", "vy", "phi", "phidot", "tau_f",
    "dy_hip", "dy_knee", "dy_swhr", "dy_sthr", "dy_phi",
    "psi_x1", "psi_x2", "psi_y1", "psi_y2", "psi_phi",
    "slope", "fx", "fy",
)  # fmt: skip
STEP_COLUMNS = ("k", "t_mid", "vx_avg", "vy_avg", "vxd", "vyd", "dx_land", "dy_land", "fell")

# lateral speed is averaged over a stride: a period-2 gait sways by a full
# step width between consecutive mid-step samples
LATERAL_WINDOW = 2


@dataclass
class StepRecord:
    k: int
    t_mid: float
    vx_avg: float
    vy_avg: float
    vxd: float
    vyd: float
    dx_land: float = math.nan
    dy_land: float = math.nan
    fell: bool = False

    def row(self) -> tuple:
        return tuple(getattr(self, c) for c in STEP_COLUMNS)


@dataclass
class Trace:
    name: str
    seed: int
    ticks: list[tuple] = field(default_factory=list)
    steps: list[StepRecord] = field(default_factory=list)
    networks: dict[str, AdaptiveNetwork] = field(default_factory=dict)
    fell: bool = False

    def column(self, name: str) -> np.ndarray:
        j = TICK_COLUMNS.index(name)
        return np.array([row[j] for row in self.ticks], dtype=float)

    def step_column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.steps], dtype=float)

    def tick_array(self) -> np.ndarray:
        return np.array(self.ticks, dtype=float).reshape(-1, len(TICK_COLUMNS))


def mid_step_velocity(
    positions: Sequence[float], t_step: float, fallback: float | None = None, window: int = 1
) -> float:
    """Average speed between mid-step samples.

    ``positions`` holds the pelvis position at every mid-step event so far,
    the newest last.  The average spans up to ``window`` steps; with a single
    sample the instantaneous ``fallback`` velocity is returned.
    """
    n = len(positions)
    if n < 2:
        if fallback is None:
            raise ValueError("first mid-step sample needs an instantaneous fallback velocity")
        return float(fallback)
    w = min(window, n - 1)
    return (positions[-1] - positions[-1 - w]) / (w * t_step)


def initial_state(model: ModelParams, v_d: tuple[float, float]) -> tuple[RobotState, tuple[float, float]]:
    """State at the start of a step on the nominal periodic orbit, and the swing foot offset."""
    T = model.t_step
    S = v_d[0] * T
    lat = lateral_step(Side.RIGHT, model.W, v_d[1], T)
    lat_prev = lateral_step(Side.LEFT, model.W, v_d[1], T)
    ex, vx = periodic_orbit_start(S, S, model)
    ey, vy = periodic_orbit_start(lat, lat_prev, model)
    state = RobotState(x=ex, y=ey, vx=vx, vy=vy, stance_side=Side.RIGHT)
    return state, (-S, -lat_prev)


def network_seeds(seed: int) -> dict[str, int]:
    children = np.random.SeedSequence(seed).spawn(len(NETWORK_NAMES) + 1)
    names = NETWORK_NAMES + ("terrain",)
    return {n: int(c.generate_state(1)[0]) for n, c in zip(names, children)}


def build_networks(cfg: ScenarioConfig) -> dict[str, AdaptiveNetwork]:
    seeds = network_seeds(cfg.seed)
    return {
        name: AdaptiveNetwork.create(
            seeds[name], n_hidden=cfg.n_hidden, output_dim=NETWORK_OUTPUTS[name], gamma=cfg.gamma
        )
        for name in NETWORK_NAMES
    }


def _tick_of(t: float, dt: float) -> int:
    return int(round(t / dt))


def simulate(cfg: ScenarioConfig) -> Trace:
    """Run the closed loop and return the raw trace."""
    dt = cfg.dt
    p_nom = cfg.model
    plant = p_nom
    T = p_nom.t_step
    n_step = int(round(T / dt))
    half = n_step // 2
    n_ticks = _tick_of(cfg.duration, dt)
    tau_ff = torso_feedforward(p_nom)
    tg = cfg.torso_gains
    phi_d = phidot_d = 0.0

    v_sched = [(_tick_of(t, dt), (vx, vy)) for t, vx, vy in cfg.velocity]
    v_d = v_sched[0][1]
    events = sorted(((_tick_of(ev.t, dt), n, ev) for n, ev in enumerate(cfg.events)), key=lambda e: e[:2])

    state, swing_start = initial_state(p_nom, v_d)
    seeds = network_seeds(cfg.seed)
    terrain_rng = np.random.default_rng(seeds["terrain"])
    nets = build_networks(cfg) if cfg.adaptive_enabled else {}
    reg = RegulatorState(gains=cfg.gains)

    trace = Trace(cfg.name, cfg.seed, networks=nets)
    ticks = trace.ticks
    x_mid: list[float] = []
    y_mid: list[float] = []
    psi = Feedforward()
    dy = ZERO_DELTA
    landing = None
    last_meas = None
    record: StepRecord | None = None
    pushes: list[tuple[int, int, float, float]] = []
    terrain_max = 0.0
    slope = 0.0
    i0 = 0
    ev_idx = v_idx = 0

    for i in range(n_ticks):
        t = i * dt
        while v_idx + 1 < len(v_sched) and v_sched[v_idx + 1][0] <= i:
            v_idx += 1
            v_d = v_sched[v_idx][1]
        while ev_idx < len(events) and events[ev_idx][0] <= i:
            ev = events[ev_idx][2]
            ev_idx += 1
            if isinstance(ev, SetMass):
                plant = replace(plant, m=ev.mass)
            elif isinstance(ev, SetComOffset):
                plant = replace(plant, c_x=p_nom.c_x + ev.offset)
            elif isinstance(ev, Push):
                ux, uy = PUSH_DIRECTIONS[ev.direction]
                pushes.append((i, i + _tick_of(ev.duration, dt), ev.force * ux, ev.force * uy))
            elif isinstance(ev, Terrain):
                terrain_max = ev.max_slope
                slope = terrain_rng.uniform(-terrain_max, terrain_max) if terrain_max > 0 else 0.0
            elif isinstance(ev, MaskChannel):
                if ev.network in nets:
                    nets[ev.network].mask_channel(ev.channel, ev.masked)

        tau = min(1.0, (i - i0) * dt / T)

        if i - i0 == half:
            x_mid.append(state.x)
            y_mid.append(state.y)
            v_x = mid_step_velocity(x_mid, T, fallback=state.vx)
            v_y = mid_step_velocity(y_mid, T, fallback=state.vy, window=LATERAL_WINDOW)
            vpx, vpy = reg.previous(v_x, v_y)
            meas = Measurement(v_x, vpx, v_y, vpy, state.phi, state.phidot)
            last_meas = meas
            if nets:
                psi = _adapt(nets, meas, v_d, phi_d, phidot_d, update=not cfg.update_per_tick)
            dy = assemble_delta_y(meas, Reference(v_d[0], v_d[1], phi_d, phidot_d), cfg.gains, psi)
            reg.remember(v_x, v_y)
            reg.latched = dy
            gait = nominal_gait_update(v_d, state, p_nom, (n_step - half) * dt, swing_start)
            landing = landing_command(gait, dy)
            gait = refit_swing(gait, landing)
            record = StepRecord(state.k, t, v_x, v_y, v_d[0], v_d[1])
        elif nets and cfg.update_per_tick and last_meas is not None:
            _adapt_tick(nets, last_meas, state, v_d, phi_d, phidot_d, dt / T)

        y2_phi = state.phi - (phi_d + dy.phi)
        tau_f = inner_loop_torque(y2_phi, state.phidot - phidot_d, tg, plant, tau_ff)

        fx = fy = 0.0
        for start, stop, px_, py_ in pushes:
            if start <= i < stop:
                fx += px_
                fy += py_

        ticks.append(
            (t, state.k, tau, state.x, state.y, state.vx, state.vy, state.phi, state.phidot, tau_f,
             dy.hip, dy.knee, dy.swhr, dy.sthr, dy.phi,
             psi.x[0], psi.x[1], psi.y[0], psi.y[1], psi.phi,
             slope, fx, fy)
        )  # fmt: skip

        dist = Disturbance(fx, fy, slope) if (fx or fy or slope) else _CALM
        try:
            state = integrate_step(state, PlantCommand(tau_f), plant, dist, dt)
        except NumericalError as exc:
            raise NumericalError(f"{cfg.name}: numeric divergence at tick {i} (t={t:.3f} s)") from exc

        if is_fallen(state, plant):
            trace.fell = True
            if record is not None:
                record.fell = True
                trace.steps.append(record)
            break

        if i + 1 - i0 == n_step:
            real = realized_landing(state, landing, plant)
            state = step_transition(state, real, plant)
            swing_start = (-real[0], -real[1])
            record.dx_land, record.dy_land = landing
            trace.steps.append(record)
            record = None
            i0 = i + 1
            if terrain_max > 0:
                slope = terrain_rng.uniform(-terrain_max, terrain_max)

    return trace


_CALM = Disturbance()


def _inputs(meas: Measurement, v_d, phi, phidot, phi_d, phidot_d) -> NetworkInput:
    return NetworkInput(meas.v_x, v_d[0], meas.v_y, v_d[1], phi, phi_d, phidot, phidot_d)


def _errors(meas: Measurement, v_d, phi, phi_d) -> dict[str, float]:
    # each error grows with its network's output: a longer step slows the
    # robot, a raised torso setpoint raises the torso
    return {"x": v_d[0] - meas.v_x, "y": v_d[1] - meas.v_y, "phi": phi - phi_d}


def _adapt(nets, meas: Measurement, v_d, phi_d, phidot_d, update: bool) -> Feedforward:
    x = _inputs(meas, v_d, meas.phi, meas.phidot, phi_d, phidot_d)
    errs = _errors(meas, v_d, meas.phi, phi_d)
    out = {}
    for name, net in nets.items():
        h = net.hidden(x)
        out[name] = net.forward_hidden(h)
        if update:
            net.update(errs[name], h)
    return Feedforward(
        x=(float(out["x"][0]), float(out["x"][1])),
        y=(float(out["y"][0]), float(out["y"][1])),
        phi=float(out["phi"][0]),
    )


def _adapt_tick(nets, meas: Measurement, state: RobotState, v_d, phi_d, phidot_d, scale: float) -> None:
    x = _inputs(meas, v_d, state.phi, state.phidot, phi_d, phidot_d)
    errs = _errors(meas, v_d, state.phi, phi_d)
    for name, net in nets.items():
        net.update(errs[name] * scale, net.hidden(x))
