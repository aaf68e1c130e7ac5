"""Phase variable and Bezier trajectory primitives."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

SWING_DEGREE = 5


@dataclass(frozen=True)
class PhaseClock:
    t_minus: float
    t_step: float

    def __post_init__(self):
        if not self.t_step > 0.0:
            raise ValueError(f"t_step must be positive, got {self.t_step}")


@dataclass(frozen=True)
class BezierCurve:
    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float]):
        coeffs = tuple(float(c) for c in coeffs)
        if len(coeffs) < 2:
            raise ValueError("a Bezier curve needs at least 2 coefficients")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def phase(clock: PhaseClock, t: float) -> float:
    """Scaled time within the current step, clamped to [0, 1]."""
    if t < clock.t_minus:
        raise ValueError(f"t={t} precedes the start of the step ({clock.t_minus})")
    tau = (t - clock.t_minus) / clock.t_step
    return min(max(tau, 0.0), 1.0)


def _check_tau(tau: float) -> None:
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"phase {tau} outside [0, 1]")


def bezier_eval(curve: BezierCurve, tau: float) -> float:
    _check_tau(tau)
    a = curve.coeffs
    M = len(a) - 1
    # exact endpoints, no round-off from the Bernstein sum
    if tau == 0.0:
        return a[0]
    if tau == 1.0:
        return a[M]
    s = 1.0 - tau
    return sum(a[k] * comb(M, k) * tau**k * s ** (M - k) for k in range(M + 1))


def bezier_deriv(curve: BezierCurve, tau: float) -> float:
    """d/dtau of the curve, via the degree M-1 hodograph."""
    _check_tau(tau)
    a = curve.coeffs
    M = len(a) - 1
    s = 1.0 - tau
    return M * sum(
        (a[k + 1] - a[k]) * comb(M - 1, k) * tau**k * s ** (M - 1 - k) for k in range(M)
    )


def swing_curve(start: float, end: float, degree: int = SWING_DEGREE) -> BezierCurve:
    """Curve from `start` to `end` with zero phase-velocity at both ends."""
    if degree < 3:
        raise ValueError("swing curves need degree >= 3 for rest-to-rest boundary conditions")
    n_lo = (degree + 1) // 2
    return BezierCurve([start] * n_lo + [end] * (degree + 1 - n_lo))
