"""
Nominal output-tracking layer.

Desired outputs are the swing-foot landing curves and an upright torso.  The
nominal gait is analytic: step length v_d * t_step, alternating step width,
plus a capture-point correction computed from the *nominal* model so that the
unperturbed closed loop has a stable periodic orbit.  The correction vanishes
on that orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .biped_model import ModelParams, RobotState, Side, closed_form_lip, saturate
from .gait_phase import BezierCurve, swing_curve

MAX_SPEED = 1.5
OUTPUT_NAMES = ("swing_x", "swing_y", "phi")


class DeltaY(NamedTuple):
    """Trajectory offsets, one entry per regulated channel."""

    hip: float = 0.0
    knee: float = 0.0
    swhr: float = 0.0
    sthr: float = 0.0
    phi: float = 0.0

    def as_outputs(self) -> np.ndarray:
        # swing offsets enter through the re-fit landing curves, not as a shift
        return np.array([0.0, 0.0, self.phi])


ZERO_DELTA = DeltaY()


def virtual_constraint_error(y_a, y_d, dy) -> np.ndarray:
    """y_a - (y_d + dy), elementwise."""
    y_a, y_d, dy = np.asarray(y_a, float), np.asarray(y_d, float), np.asarray(dy, float)
    if not (y_a.shape == y_d.shape == dy.shape):
        raise ValueError(f"output layouts differ: {y_a.shape}, {y_d.shape}, {dy.shape}")
    return y_a - (y_d + dy)


@dataclass(frozen=True)
class OutputSet:
    y_a: np.ndarray
    y_d: np.ndarray
    dy: np.ndarray

    @property
    def y2(self) -> np.ndarray:
        return virtual_constraint_error(self.y_a, self.y_d, self.dy)


@dataclass(frozen=True)
class TorsoGains:
    Kp_t: float = 80.0
    Kd_t: float = 8.0


@dataclass(frozen=True)
class NominalGait:
    v_d_x: float
    v_d_y: float
    S_nom_x: float
    lateral_target: float
    W: float
    phi_d: float = 0.0
    phidot_d: float = 0.0
    fb_x: float = 0.0
    fb_y: float = 0.0
    swing_x: BezierCurve | None = None
    swing_y: BezierCurve | None = None


def _check_speed(v_d: Sequence[float]) -> None:
    if len(v_d) != 2 or any(not math.isfinite(v) or abs(v) > MAX_SPEED for v in v_d):
        raise ValueError(f"desired velocity {tuple(v_d)} outside +/-{MAX_SPEED} m/s")


def lateral_step(stance: Side, W: float, v_d_y: float, t_step: float) -> float:
    """Nominal lateral landing offset for the swing leg: outward by W, plus drift."""
    return (W if stance is Side.RIGHT else -W) + v_d_y * t_step


def periodic_orbit_start(d_next: float, d_after: float, p: ModelParams) -> tuple[float, float]:
    """Start-of-step (offset from foot, velocity) on the period-2 LIP orbit.

    ``d_next`` is the foot displacement at the end of this step and ``d_after``
    the one after it.  For a period-1 gait pass the same value twice.
    """
    lam, T = p.lam, p.t_step
    ch, sh = math.cosh(lam * T), math.sinh(lam * T)
    A = np.array([[ch, sh / lam], [lam * sh, ch]])
    RA = np.diag([1.0, p.rho]) @ A
    rhs = -RA @ np.array([d_next, 0.0]) - np.array([d_after, 0.0])
    e0, v0 = np.linalg.solve(np.eye(2) - RA @ RA, rhs)
    return float(e0), float(v0)


def _capture_point_landing(e_td: float, v_td: float, d_next: float, d_after: float, p: ModelParams) -> float:
    # place the pivot so the next step ends with the orbit's capture point
    lam, T = p.lam, p.t_step
    e0, v0 = periodic_orbit_start(d_next, d_after, p)
    e_end, v_end = closed_form_lip(e0, v0, 0.0, p, T)
    xi_end = e_end + v_end / lam
    return e_td + p.rho * v_td / lam - math.exp(-lam * T) * xi_end


def nominal_gait_update(
    v_d: Sequence[float],
    s: RobotState,
    p: ModelParams,
    t_remaining: float | None = None,
    swing_start: tuple[float, float] = (0.0, 0.0),
) -> NominalGait:
    """Nominal gait for the rest of the current step.

    ``p`` is the controller's (nominal) model.  The touchdown state is
    predicted ``t_remaining`` seconds ahead with the unactuated LIP, and the
    capture-point correction is the landing change that puts the next step
    back on the periodic orbit for ``v_d``.
    """
    _check_speed(v_d)
    v_dx, v_dy = float(v_d[0]), float(v_d[1])
    T = p.t_step
    if t_remaining is None:
        t_remaining = 0.5 * T
    S = v_dx * T
    lat = lateral_step(s.stance_side, p.W, v_dy, T)
    lat_after = lateral_step(s.stance_side.other(), p.W, v_dy, T)

    ex, vx = closed_form_lip(s.x, s.vx, s.px, p, t_remaining)
    ey, vy = closed_form_lip(s.y, s.vy, s.py, p, t_remaining)
    fb_x = _capture_point_landing(ex - s.px, vx, S, S, p) - S
    fb_y = _capture_point_landing(ey - s.py, vy, lat_after, lat, p) - lat

    return NominalGait(
        v_d_x=v_dx,
        v_d_y=v_dy,
        S_nom_x=S,
        lateral_target=lat,
        W=p.W,
        fb_x=fb_x,
        fb_y=fb_y,
        swing_x=swing_curve(swing_start[0], S + fb_x),
        swing_y=swing_curve(swing_start[1], lat + fb_y),
    )


def landing_command(gait: NominalGait, dy: DeltaY = ZERO_DELTA) -> tuple[float, float]:
    """Landing offset relative to the stance foot.

    Each plane has two redundant channels; their offsets add.
    """
    dx_land = gait.S_nom_x + gait.fb_x + dy.hip + dy.knee
    dy_land = gait.lateral_target + gait.fb_y + dy.swhr + dy.sthr
    return dx_land, dy_land


def refit_swing(gait: NominalGait, landing: tuple[float, float]) -> NominalGait:
    """Move the swing curves' endpoints to a new landing, keeping their start."""
    sx = gait.swing_x.coeffs[0] if gait.swing_x else 0.0
    sy = gait.swing_y.coeffs[0] if gait.swing_y else 0.0
    return replace(gait, swing_x=swing_curve(sx, landing[0]), swing_y=swing_curve(sy, landing[1]))


def torso_feedforward(p_nominal: ModelParams) -> float:
    """Torque holding the nominal torso upright against its nominal COM offset."""
    return p_nominal.m * p_nominal.g * p_nominal.c_x


def inner_loop_torque(
    y2_phi: float,
    y2dot_phi: float,
    gains: TorsoGains,
    p: ModelParams,
    tau_ff: float = 0.0,
) -> float:
    return saturate(tau_ff - gains.Kp_t * y2_phi - gains.Kd_t * y2dot_phi, p.tau_f_max)
