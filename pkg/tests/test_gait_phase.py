import math

import pytest
from hypothesis import given, strategies as st

from gaitadapt.gait_phase import BezierCurve, PhaseClock, bezier_deriv, bezier_eval, phase, swing_curve

finite = st.floats(-10.0, 10.0, allow_nan=False)
unit = st.floats(0.0, 1.0)


def test_phase_examples():
    clock = PhaseClock(0.0, 0.4)
    assert phase(clock, 0.0) == 0.0
    assert phase(clock, 0.2) == pytest.approx(0.5, abs=1e-15)
    assert phase(clock, 0.4) == 1.0
    assert phase(clock, 0.9) == 1.0


def test_phase_before_step_start_rejected():
    with pytest.raises(ValueError):
        phase(PhaseClock(1.0, 0.4), 0.5)


def test_clock_needs_positive_step():
    with pytest.raises(ValueError):
        PhaseClock(0.0, 0.0)


@given(st.floats(0.0, 100.0), st.floats(0.05, 2.0), st.floats(0.0, 10.0))
def test_phase_in_unit_interval(t0, T, dt):
    tau = phase(PhaseClock(t0, T), t0 + dt)
    assert 0.0 <= tau <= 1.0


def test_bezier_endpoints_exact():
    c = BezierCurve([0.3, -1.0, 2.0, 5.0, 0.7])
    assert bezier_eval(c, 0.0) == 0.3
    assert bezier_eval(c, 1.0) == 0.7


def test_linear_bezier_is_lerp():
    c = BezierCurve([2.0, 4.0])
    assert bezier_eval(c, 0.25) == pytest.approx(2.5)
    assert bezier_deriv(c, 0.6) == pytest.approx(2.0)


def test_evenly_spaced_coefficients_give_a_line():
    # degree elevation of a line keeps evenly spaced control points
    c = BezierCurve([0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    for tau in (0.1, 0.33, 0.9):
        assert bezier_eval(c, tau) == pytest.approx(tau, abs=1e-14)
        assert bezier_deriv(c, tau) == pytest.approx(1.0, abs=1e-13)


def test_quadratic_closed_form():
    a, b, c = 1.0, -2.0, 3.0
    curve = BezierCurve([a, b, c])
    tau = 0.3
    expected = (1 - tau) ** 2 * a + 2 * tau * (1 - tau) * b + tau**2 * c
    assert bezier_eval(curve, tau) == pytest.approx(expected, abs=1e-15)
    assert bezier_deriv(curve, tau) == pytest.approx(2 * ((1 - tau) * (b - a) + tau * (c - b)), abs=1e-14)


def test_out_of_range_phase_rejected():
    c = BezierCurve([0.0, 1.0])
    with pytest.raises(ValueError):
        bezier_eval(c, 1.5)
    with pytest.raises(ValueError):
        bezier_deriv(c, -0.1)


def test_degenerate_curve_rejected():
    with pytest.raises(ValueError):
        BezierCurve([1.0])


@given(st.lists(finite, min_size=2, max_size=8), unit)
def test_convex_hull(coeffs, tau):
    v = bezier_eval(BezierCurve(coeffs), tau)
    assert min(coeffs) - 1e-9 <= v <= max(coeffs) + 1e-9


@given(st.lists(finite, min_size=2, max_size=7), st.floats(0.01, 0.99))
def test_derivative_matches_finite_difference(coeffs, tau):
    c = BezierCurve(coeffs)
    h = 1e-6
    fd = (bezier_eval(c, tau + h) - bezier_eval(c, tau - h)) / (2 * h)
    assert bezier_deriv(c, tau) == pytest.approx(fd, abs=1e-5 * (1 + max(map(abs, coeffs))))


@given(finite, finite)
def test_swing_curve_rest_to_rest(start, end):
    c = swing_curve(start, end)
    assert c.degree == 5
    assert bezier_eval(c, 0.0) == start
    assert bezier_eval(c, 1.0) == end
    assert bezier_deriv(c, 0.0) == 0.0
    assert bezier_deriv(c, 1.0) == 0.0


def test_swing_curve_is_monotone():
    c = swing_curve(-0.2, 0.3)
    vals = [bezier_eval(c, i / 50) for i in range(51)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert math.isclose(bezier_eval(c, 0.5), 0.05, abs_tol=1e-12)
