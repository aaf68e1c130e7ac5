import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from gaitadapt.biped_model import (
    Disturbance,
    ModelParams,
    NumericalError,
    PlantCommand,
    RobotState,
    Side,
    closed_form_lip,
    continuous_dynamics,
    integrate_step,
    is_fallen,
    orbital_energy,
    realized_landing,
    step_transition,
)

# a bare pendulum: no torso offset, so the torso does not load the pelvis
BARE = ModelParams(c_x=0.0)
ZERO = PlantCommand(0.0)


def stance(s, p, T=0.4, dt=1e-3, u=ZERO, d=None):
    d = d or Disturbance()
    for _ in range(int(round(T / dt))):
        s = integrate_step(s, u, p, d, dt)
    return s


def test_matches_closed_form_over_one_step():
    s0 = RobotState(x=-0.1, vx=0.5, y=0.05, vy=-0.2, px=0.0, py=0.0)
    s = stance(s0, BARE)
    x, v = closed_form_lip(-0.1, 0.5, 0.0, BARE, 0.4)
    y, vy = closed_form_lip(0.05, -0.2, 0.0, BARE, 0.4)
    assert abs(s.x - x) <= 1e-8 and abs(s.vx - v) <= 1e-7
    assert abs(s.y - y) <= 1e-8 and abs(s.vy - vy) <= 1e-7
    assert s.t == pytest.approx(0.4)


def test_fourth_order_convergence():
    s0 = RobotState(x=-0.1, vx=0.5)
    x_ref, _ = closed_form_lip(-0.1, 0.5, 0.0, BARE, 0.4)
    e1 = abs(stance(s0, BARE, dt=0.04).x - x_ref)
    e2 = abs(stance(s0, BARE, dt=0.02).x - x_ref)
    assert 12.0 < e1 / e2 < 20.0


def test_orbital_energy_conserved_within_stance():
    p = BARE
    s = RobotState(x=-0.12, vx=0.45, y=0.08, vy=-0.1)
    ex0 = orbital_energy(s.x - s.px, s.vx, p)
    ey0 = orbital_energy(s.y - s.py, s.vy, p)
    s = stance(s, p)
    assert orbital_energy(s.x - s.px, s.vx, p) == pytest.approx(ex0, rel=1e-6)
    assert orbital_energy(s.y - s.py, s.vy, p) == pytest.approx(ey0, rel=1e-6)


@given(st.floats(5.0, 40.0))
@settings(max_examples=20, deadline=None)
def test_unforced_pendulum_is_mass_independent(m):
    s0 = RobotState(x=-0.1, vx=0.5)
    a = stance(s0, BARE, T=0.1)
    b = stance(s0, replace(BARE, m=m), T=0.1)
    assert a.x == pytest.approx(b.x, abs=1e-12)
    assert a.vx == pytest.approx(b.vx, abs=1e-12)


def test_com_offset_bias_signs():
    p = replace(BARE, c_x=0.1)
    d = continuous_dynamics(RobotState(), ZERO, p)
    # torso COM ahead of the hip tips the torso forward and pulls the pelvis ahead
    assert d.dphidot < 0
    assert d.dvx > 0
    assert d.dphidot == pytest.approx(-p.m * p.g * p.c_x / p.J)


def test_torque_reaction_pushes_pelvis_back():
    d = continuous_dynamics(RobotState(), PlantCommand(10.0), BARE)
    assert d.dvx == pytest.approx(-10.0 / (BARE.m * BARE.h))
    assert d.dphidot == pytest.approx(10.0 / BARE.J)


def test_feedforward_cancels_offset_in_both_channels():
    p = ModelParams()
    d = continuous_dynamics(RobotState(), PlantCommand(p.m * p.g * p.c_x), p)
    assert d.dphidot == pytest.approx(0.0, abs=1e-12)
    assert d.dvx == pytest.approx(0.0, abs=1e-12)


def test_external_force_and_slope():
    d = continuous_dynamics(RobotState(), ZERO, BARE, Disturbance(f_ext_x=10.0, f_ext_y=-5.0))
    assert d.dvx == pytest.approx(10.0 / BARE.m)
    assert d.dvy == pytest.approx(-5.0 / BARE.m)
    uphill = continuous_dynamics(RobotState(), ZERO, BARE, Disturbance(slope_theta=0.1))
    assert uphill.dvx == pytest.approx(-BARE.g * math.sin(0.1))


def test_slope_limit():
    with pytest.raises(ValueError):
        Disturbance(slope_theta=math.radians(26))


def test_non_finite_state_raises():
    with pytest.raises(NumericalError):
        integrate_step(RobotState(x=math.nan), ZERO, BARE)
    with pytest.raises(NumericalError):
        continuous_dynamics(RobotState(vx=math.inf), ZERO, BARE)


def test_bad_time_step():
    with pytest.raises(ValueError):
        integrate_step(RobotState(), ZERO, BARE, dt=0.0)


@given(
    st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(-1, 1), st.floats(-1, 1),
    st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(0.5, 1.0),
)  # fmt: skip
def test_reset_map(x, vx, dx, dy, y, vy, rho):
    p = replace(BARE, rho=rho)
    s = RobotState(x=x, y=y, vx=vx, vy=vy, phi=0.1, phidot=0.2, px=0.3, py=-0.1, stance_side=Side.LEFT, k=4)
    r = step_transition(s, (dx, dy), p)
    assert (r.x, r.y, r.phi, r.phidot, r.t) == (s.x, s.y, s.phi, s.phidot, s.t)
    assert r.px == s.px + dx and r.py == s.py + dy
    assert r.vx == rho * vx and r.vy == rho * vy
    assert r.stance_side is Side.RIGHT and r.k == 5


def test_reset_rejects_non_finite_landing():
    with pytest.raises(ValueError):
        step_transition(RobotState(), (math.nan, 0.0), BARE)


def test_landing_shifts_with_torso_pitch():
    p = ModelParams()
    assert realized_landing(RobotState(), (0.2, 0.1), p) == (0.2, 0.1)
    dx, dy = realized_landing(RobotState(phi=0.1), (0.2, 0.1), p)
    assert dx == pytest.approx(0.2 - p.lean_lever * math.sin(0.1))
    assert dy == 0.1


def test_fall_detection():
    assert not is_fallen(RobotState(x=0.1, vx=0.5))
    assert is_fallen(RobotState(phi=0.9))
    assert is_fallen(RobotState(x=2.0))
    assert is_fallen(RobotState(vx=-3.5))
    assert is_fallen(RobotState(vy=2.5))


@pytest.mark.parametrize(
    "kw", [dict(m=0.0), dict(h=-1.0), dict(t_step=0.0), dict(rho=1.5), dict(tau_f_max=0.0), dict(r_gyr=0.0)]
)
def test_invalid_params(kw):
    with pytest.raises(ValueError):
        ModelParams(**kw)


def test_inertia_and_frequency():
    p = ModelParams()
    assert p.J == pytest.approx(p.m * 0.09)
    assert p.lam == pytest.approx(math.sqrt(9.81 / 0.9))


def test_hand_evaluated_accelerations():
    assert continuous_dynamics(RobotState(x=0.3, px=0.3), ZERO, BARE).dvx == 0.0
    assert continuous_dynamics(RobotState(x=0.1), ZERO, BARE).dvx == pytest.approx(1.09, abs=1e-12)
    p = ModelParams(c_x=0.1)
    assert continuous_dynamics(RobotState(), ZERO, p).dphidot == pytest.approx(-10.9, abs=1e-12)
