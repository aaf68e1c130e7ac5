"""
Reduced-order 3D walking plant.

A linear inverted pendulum in the sagittal and frontal planes carrying a torso
that acts as a reaction flywheel in pitch.  The stance foot is a point pivot;
a step is a discrete jump of the pivot (the reset map).

Sign conventions: positive ``phi`` pitches the torso backward.  A torso centre
of mass ahead of the hip (``c_x > 0``) therefore drives ``phi`` negative, and a
positive torso torque ``tau_f`` pushes the pelvis backward as a reaction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple


class NumericalError(RuntimeError):
    """Raised when the simulated state stops being finite."""


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"

    def other(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


@dataclass(frozen=True)
class RobotState:
    x: float = 0.0
    y: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    phi: float = 0.0
    phidot: float = 0.0
    px: float = 0.0
    py: float = 0.0
    stance_side: Side = Side.RIGHT
    k: int = 0
    t: float = 0.0

    def is_finite(self) -> bool:
        return all(
            math.isfinite(v)
            for v in (self.x, self.y, self.vx, self.vy, self.phi, self.phidot, self.px, self.py, self.t)
        )


@dataclass(frozen=True)
class ModelParams:
    """True plant parameters.

    ``c_x`` defaults to the nominal torso COM offset that the nominal
    controller compensates with a feedforward torque; uncertainty scenarios
    perturb ``m`` and ``c_x`` away from these values.

    ``lean_lever`` converts torso pitch at touchdown into a landing error:
    swing-foot targets are realised in the torso frame, so a pitched torso
    carries the foot with it.
    """

    m: float = 10.33
    r_gyr: float = 0.3
    h: float = 0.9
    c_x: float = 0.05
    g: float = 9.81
    t_step: float = 0.4
    rho: float = 1.0
    W: float = 0.2
    tau_f_max: float = 60.0
    lean_lever: float = 0.25

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if not self.h > 0:
            raise ValueError(f"pendulum height must be positive, got {self.h}")
        if not self.t_step > 0:
            raise ValueError(f"t_step must be positive, got {self.t_step}")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")
        if not self.tau_f_max > 0:
            raise ValueError(f"tau_f_max must be positive, got {self.tau_f_max}")
        if not self.r_gyr > 0:
            raise ValueError(f"r_gyr must be positive, got {self.r_gyr}")

    @property
    def J(self) -> float:
        return self.m * self.r_gyr**2

    @property
    def lam(self) -> float:
        return math.sqrt(self.g / self.h)


MAX_SLOPE = math.radians(25.0)


@dataclass(frozen=True)
class Disturbance:
    f_ext_x: float = 0.0
    f_ext_y: float = 0.0
    slope_theta: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.f_ext_x, self.f_ext_y, self.slope_theta)):
            raise ValueError("disturbance must be finite")
        if abs(self.slope_theta) > MAX_SLOPE:
            raise ValueError(f"slope {self.slope_theta} rad exceeds 25 degrees")


NO_DISTURBANCE = Disturbance()


@dataclass(frozen=True)
class PlantCommand:
    tau_f: float = 0.0


def saturate(value: float, limit: float) -> float:
    return max(-limit, min(limit, value))


class StateDerivative(NamedTuple):
    dx: float
    dy: float
    dvx: float
    dvy: float
    dphi: float
    dphidot: float


def _derivs(x, y, vx, vy, phidot, tau_f, px, py, p: ModelParams, d: Disturbance) -> StateDerivative:
    g, h, m = p.g, p.h, p.m
    ax = (g / h) * (x + p.c_x - px) - tau_f / (m * h) + d.f_ext_x / m - g * math.sin(d.slope_theta)
    ay = (g / h) * (y - py) + d.f_ext_y / m
    phiddot = (tau_f - m * g * p.c_x) / p.J
    return StateDerivative(vx, vy, ax, ay, phidot, phiddot)


def continuous_dynamics(
    s: RobotState, u: PlantCommand, p: ModelParams, d: Disturbance = NO_DISTURBANCE
) -> StateDerivative:
    """Time derivative of the continuous part of the state.

    The foot position, stance side and step index are constant during stance
    and are therefore omitted from the result.
    """
    if not s.is_finite():
        raise NumericalError(f"non-finite state at t={s.t}: {s}")
    return _derivs(s.x, s.y, s.vx, s.vy, s.phidot, u.tau_f, s.px, s.py, p, d)


def integrate_step(
    s: RobotState,
    u: PlantCommand,
    p: ModelParams,
    d: Disturbance = NO_DISTURBANCE,
    dt: float = 1e-3,
) -> RobotState:
    """One classical RK4 step with the command held constant over ``dt``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    x, y, vx, vy, phi, phidot = s.x, s.y, s.vx, s.vy, s.phi, s.phidot
    # a sum is finite only if every term is (or it overflowed, which is divergence too)
    if not math.isfinite(x + y + vx + vy + phi + phidot + s.px + s.py):
        raise NumericalError(f"non-finite state at t={s.t}: {s}")
    w2 = p.g / p.h
    # everything but the position-dependent term is constant over the step
    ax0 = w2 * (p.c_x - s.px) - u.tau_f / (p.m * p.h) + d.f_ext_x / p.m - p.g * math.sin(d.slope_theta)
    ay0 = -w2 * s.py + d.f_ext_y / p.m
    alpha = (u.tau_f - p.m * p.g * p.c_x) / p.J
    h2, h6 = 0.5 * dt, dt / 6.0

    # k1..k4 for (x, y, vx, vy, phi, phidot); angular acceleration is constant
    ax1, ay1 = w2 * x + ax0, w2 * y + ay0
    x2, y2, vx2, vy2 = x + h2 * vx, y + h2 * vy, vx + h2 * ax1, vy + h2 * ay1
    ax2, ay2 = w2 * x2 + ax0, w2 * y2 + ay0
    x3, y3, vx3, vy3 = x + h2 * vx2, y + h2 * vy2, vx + h2 * ax2, vy + h2 * ay2
    ax3, ay3 = w2 * x3 + ax0, w2 * y3 + ay0
    x4, y4, vx4, vy4 = x + dt * vx3, y + dt * vy3, vx + dt * ax3, vy + dt * ay3
    ax4, ay4 = w2 * x4 + ax0, w2 * y4 + ay0
    pd2 = phidot + h2 * alpha
    pd4 = phidot + dt * alpha

    out = RobotState(
        x + h6 * (vx + 2.0 * vx2 + 2.0 * vx3 + vx4),
        y + h6 * (vy + 2.0 * vy2 + 2.0 * vy3 + vy4),
        vx + h6 * (ax1 + 2.0 * ax2 + 2.0 * ax3 + ax4),
        vy + h6 * (ay1 + 2.0 * ay2 + 2.0 * ay3 + ay4),
        phi + h6 * (phidot + 4.0 * pd2 + pd4),
        phidot + h6 * (6.0 * alpha),
        s.px,
        s.py,
        s.stance_side,
        s.k,
        s.t + dt,
    )
    if not math.isfinite(out.x + out.y + out.vx + out.vy + out.phi + out.phidot):
        raise NumericalError(f"integration diverged at t={s.t}")
    return out


def closed_form_lip(x0: float, v0: float, p_foot: float, p: ModelParams, t: float) -> tuple[float, float]:
    """Exact unactuated LIP solution about a fixed foot."""
    lam = p.lam
    ch, sh = math.cosh(lam * t), math.sinh(lam * t)
    e0 = x0 - p_foot
    return p_foot + e0 * ch + (v0 / lam) * sh, lam * e0 * sh + v0 * ch


def step_transition(s: RobotState, landing: tuple[float, float], p: ModelParams) -> RobotState:
    """Reset map: move the pivot by ``landing`` and swap the stance leg."""
    dx, dy = landing
    if not (math.isfinite(dx) and math.isfinite(dy)):
        raise ValueError(f"non-finite landing offset {landing}")
    return replace(
        s,
        px=s.px + dx,
        py=s.py + dy,
        vx=p.rho * s.vx,
        vy=p.rho * s.vy,
        stance_side=s.stance_side.other(),
        k=s.k + 1,
    )


def realized_landing(s: RobotState, landing: tuple[float, float], p: ModelParams) -> tuple[float, float]:
    """Landing offset actually achieved when the commanded one is executed in the torso frame."""
    dx, dy = landing
    return dx - p.lean_lever * math.sin(s.phi), dy


def is_fallen(s: RobotState, p: ModelParams | None = None) -> bool:
    return abs(s.phi) > 0.8 or abs(s.x - s.px) > 1.5 or abs(s.vx) > 3.0 or abs(s.vy) > 2.0


def orbital_energy(e: float, v: float, p: ModelParams) -> float:
    """LIP orbital energy (v^2 - lambda^2 e^2) / 2, conserved within an unactuated stance."""
    return 0.5 * (v * v - p.lam**2 * e * e)
