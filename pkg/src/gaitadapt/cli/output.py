"""Trace, weight and summary files."""

from __future__ import annotations

import json
import math
from pathlib import Path

from ..harness import STEP_COLUMNS, TICK_COLUMNS, Metrics, ScenarioConfig, Trace

SUMMARY_KEYS = (
    "steady_state_err_x",
    "steady_state_err_y",
    "convergence_time_x",
    "convergence_time_y",
)


def _cell(v) -> str:
    # repr is the shortest string that reads back to the same double
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _steps_path(path: Path, ext: str) -> Path:
    return path.with_name(path.name[: -len(path.suffix)] + ".steps" + ext)


def emit_trace(trace: Trace, path: str | Path, fmt: str = "csv") -> list[Path]:
    """Write per-tick rows to ``path`` and per-step rows to its ``.steps`` sibling."""
    path = Path(path)
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown trace format {fmt!r}")
    ext = "." + fmt
    if path.suffix != ext:
        path = path.with_name(path.name + ext)
    steps_path = _steps_path(path, ext)
    step_rows = [s.row() for s in trace.steps]
    try:
        if fmt == "csv":
            _write_csv(path, TICK_COLUMNS, trace.ticks)
            _write_csv(steps_path, STEP_COLUMNS, step_rows)
        else:
            _write_jsonl(path, TICK_COLUMNS, trace.ticks)
            _write_jsonl(steps_path, STEP_COLUMNS, step_rows)
    except OSError as exc:
        raise OSError(f"cannot write trace {path}: {exc.strerror}") from exc
    return [path, steps_path]


def _write_csv(path: Path, columns, rows) -> None:
    with path.open("w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _write_jsonl(path: Path, columns, rows) -> None:
    with path.open("w") as fh:
        for row in rows:
            fh.write(json.dumps({c: _json_value(v) for c, v in zip(columns, row)}) + "\n")


def write_weights(trace: Trace, out_dir: Path, stem: str) -> list[Path]:
    paths = []
    for name, net in trace.networks.items():
        p = out_dir / f"{stem}.weights_{name}.txt"
        net.write_snapshot(p)
        paths.append(p)
    return paths


def summary_entry(cfg: ScenarioConfig, metrics: Metrics) -> dict:
    entry = {
        "name": cfg.name,
        "seed": cfg.seed,
        "adaptive": cfg.adaptive_enabled,
        "fell": metrics.fell,
    }
    for key in SUMMARY_KEYS:
        entry[key] = getattr(metrics, key)
    entry["max_abs_phi"] = metrics.max_abs_phi
    entry["reasons"] = dict(metrics.reasons)
    return entry


def compare_block(on: dict, off: dict) -> dict:
    block = {"name": on["name"], "adaptive_on": on, "adaptive_off": off}
    e_on, e_off = on["steady_state_err_x"], off["steady_state_err_x"]
    block["error_ratio_x"] = e_off / e_on if e_on and e_off is not None else None
    return block


def emit_summary(entries: list[dict], path: str | Path, compare: list[dict] | None = None) -> Path:
    if not entries:
        raise ValueError("summary needs at least one scenario result")
    path = Path(path)
    doc = {"scenarios": entries, "compare": compare or []}
    try:
        path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write summary {path}: {exc.strerror}") from exc
    return path


def _fmt(v, spec: str) -> str:
    if v is None:
        width = spec.split(".")[0]
        return format("-", ">" + width) if width else "-"
    return format(v, spec)


def comparison_table(blocks: list[dict]) -> str:
    head = f"{'scenario':<24} {'arm':<4} {'fell':<5} {'err_x':>9} {'err_y':>9} {'conv_x':>8} {'conv_y':>8}"
    lines = [head, "-" * len(head)]
    for b in blocks:
        for arm, key in (("on", "adaptive_on"), ("off", "adaptive_off")):
            e = b[key]
            lines.append(
                f"{b['name']:<24} {arm:<4} {str(e['fell']).lower():<5} "
                f"{_fmt(e['steady_state_err_x'], '9.4f')} {_fmt(e['steady_state_err_y'], '9.4f')} "
                f"{_fmt(e['convergence_time_x'], '8.1f')} {_fmt(e['convergence_time_y'], '8.1f')}"
            )
        lines.append(f"{'':<24} off/on error ratio x: {_fmt(b['error_ratio_x'], '.2f')}")
    return "\n".join(lines)
