"""Step-level tracking metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .engine import StepRecord, Trace

CONVERGENCE_TOL = 0.02
STEADY_WINDOW = 10


@dataclass
class AxisMetrics:
    steady_state_err: float | None
    convergence_time: float | None
    convergence_step: int | None
    reason: str | None = None


@dataclass
class SegmentMetrics:
    t_start: float
    t_end: float
    v_d: tuple[float, float]
    n_steps: int
    x: AxisMetrics
    y: AxisMetrics


@dataclass
class Metrics:
    steady_state_err_x: float | None
    steady_state_err_y: float | None
    convergence_time_x: float | None
    convergence_time_y: float | None
    fell: bool
    max_abs_phi: float
    convergence_step_x: int | None = None
    convergence_step_y: int | None = None
    reasons: dict[str, str] = field(default_factory=dict)
    segments: list[SegmentMetrics] = field(default_factory=list)


def axis_metrics(
    steps: list[StepRecord],
    axis: str,
    fell: bool = False,
    tol: float = CONVERGENCE_TOL,
    window: int = STEADY_WINDOW,
) -> AxisMetrics:
    v = np.array([getattr(s, f"v{axis}_avg") for s in steps])
    v_d = np.array([getattr(s, f"v{axis}d") for s in steps])
    err = np.abs(v - v_d)
    if len(steps) < window:
        return AxisMetrics(None, None, None, f"segment has {len(steps)} < {window} steps")
    ss = float(np.mean(err[-window:]))
    if fell:
        return AxisMetrics(ss, None, None, "fell")
    outside = np.nonzero(err > tol)[0]
    if outside.size == 0:
        first = 0
    elif outside[-1] == len(steps) - 1:
        return AxisMetrics(ss, None, None, "not converged")
    else:
        first = int(outside[-1]) + 1
    return AxisMetrics(ss, float(steps[first].t_mid), steps[first].k)


def compute_metrics(trace: Trace, cfg: ScenarioConfig) -> Metrics:
    if not trace.ticks:
        raise ValueError("cannot compute metrics of an empty trace")
    bounds = [seg[0] for seg in cfg.velocity] + [float("inf")]
    segments = []
    for n, seg in enumerate(cfg.velocity):
        lo, hi = bounds[n], bounds[n + 1]
        steps = [s for s in trace.steps if lo <= s.t_mid < hi]
        segments.append(
            SegmentMetrics(
                t_start=lo,
                t_end=min(hi, cfg.duration),
                v_d=(seg[1], seg[2]),
                n_steps=len(steps),
                x=axis_metrics(steps, "x", trace.fell),
                y=axis_metrics(steps, "y", trace.fell),
            )
        )
    last = segments[-1]
    reasons = {}
    for axis, am in (("x", last.x), ("y", last.y)):
        if am.reason:
            reasons[f"convergence_time_{axis}"] = am.reason
            if am.steady_state_err is None:
                reasons[f"steady_state_err_{axis}"] = am.reason
    phi = trace.column("phi")
    return Metrics(
        steady_state_err_x=last.x.steady_state_err,
        steady_state_err_y=last.y.steady_state_err,
        convergence_time_x=last.x.convergence_time,
        convergence_time_y=last.y.convergence_time,
        fell=trace.fell,
        max_abs_phi=float(np.max(np.abs(phi))),
        convergence_step_x=last.x.convergence_step,
        convergence_step_y=last.y.convergence_step,
        reasons=reasons,
        segments=segments,
    )
