"""Per-step velocity and torso regulators, with optional learned feedforward."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .nominal_controller import DeltaY, ZERO_DELTA


@dataclass(frozen=True)
class RegulatorGains:
    # Kp_x/Kd_x in m per (m/s); Kp_phi in rad/rad, Kd_phi in rad per (rad/s)
    Kp_x: float = 0.10
    Kd_x: float = 0.05
    Kp_y: float = 0.10
    Kd_y: float = 0.05
    Kp_phi: float = 0.0
    Kd_phi: float = 0.0

    def __post_init__(self):
        for name, value in vars(self).items():
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"gain {name} must be finite and non-negative, got {value}")


class Measurement(NamedTuple):
    v_x: float
    v_x_prev: float
    v_y: float
    v_y_prev: float
    phi: float
    phidot: float


class Reference(NamedTuple):
    v_d_x: float
    v_d_y: float
    phi_d: float = 0.0
    phidot_d: float = 0.0


class Feedforward(NamedTuple):
    """Network outputs: two per plane, one for the torso."""

    x: tuple[float, float] = (0.0, 0.0)
    y: tuple[float, float] = (0.0, 0.0)
    phi: float = 0.0


NO_FEEDFORWARD = Feedforward()


@dataclass
class RegulatorState:
    gains: RegulatorGains = field(default_factory=RegulatorGains)
    v_prev_x: float | None = None
    v_prev_y: float | None = None
    latched: DeltaY = ZERO_DELTA

    def previous(self, v_x: float, v_y: float) -> tuple[float, float]:
        """Last step's velocities; the first measurement stands in for its own predecessor."""
        vpx = v_x if self.v_prev_x is None else self.v_prev_x
        vpy = v_y if self.v_prev_y is None else self.v_prev_y
        return vpx, vpy

    def remember(self, v_x: float, v_y: float) -> None:
        self.v_prev_x, self.v_prev_y = v_x, v_y


def foot_placement_x(v_k: float, v_prev: float, v_d: float, gains: RegulatorGains) -> float:
    """Longitudinal landing offset; positive (longer step) when walking too fast."""
    return gains.Kp_x * (v_k - v_d) + gains.Kd_x * (v_k - v_prev)


def foot_placement_y(v_k: float, v_prev: float, v_d: float, gains: RegulatorGains) -> float:
    return gains.Kp_y * (v_k - v_d) + gains.Kd_y * (v_k - v_prev)


def torso_offset(phi: float, phidot: float, phi_d: float, phidot_d: float, gains: RegulatorGains) -> float:
    return gains.Kp_phi * (phi - phi_d) + gains.Kd_phi * (phidot - phidot_d)


def assemble_delta_y(
    meas: Measurement,
    refs: Reference,
    gains: RegulatorGains,
    psi: Feedforward = NO_FEEDFORWARD,
) -> DeltaY:
    """PD regulator plus feedforward for each decoupled subsystem.

    The PD term of each plane goes to the first channel of its pair (hip pitch,
    swing hip roll); the second channel carries feedforward only.
    """
    dx = foot_placement_x(meas.v_x, meas.v_x_prev, refs.v_d_x, gains)
    dy = foot_placement_y(meas.v_y, meas.v_y_prev, refs.v_d_y, gains)
    dphi = torso_offset(meas.phi, meas.phidot, refs.phi_d, refs.phidot_d, gains)
    return DeltaY(
        hip=dx + psi.x[0],
        knee=psi.x[1],
        swhr=dy + psi.y[0],
        sthr=psi.y[1],
        phi=dphi + psi.phi,
    )
