"""Trace CSV and report JSON serialization.

The trace file is one flat CSV feeding every estimator and the plot scripts.  Floats
are written with 17 significant digits so a write/read round trip reproduces every
sample bit-exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import TraceFormatError
from .sim import MODE_NAMES, SimulationTrace

TRACE_COLUMNS = (
    "t",
    "f_hz",
    "delta_f_pu",
    "rocof_hz_s",
    "p_thermal_pu",
    "p_hydro_pu",
    "p_wind_pu",
    "p_load_pu",
    "omega_wt_pu",
    "mode",
)

_MODE_CODES = {name: code for code, name in MODE_NAMES.items()}

REPORT_SCHEMA_VERSION = 1
_REPORT_KEYS = {"schema_version", "kind", "created_utc", "run", "scenarios", "regression",
                "regression_notice", "checks"}
_ESTIMATE_REPORT_KEYS = {"schema_version", "kind", "created_utc", "trace", "dp_dist_pu",
                         "t_dist_s", "f0_hz", "estimates"}


def _fmt(x: float) -> str:
    return format(x, ".17g")


@dataclass
class TraceFrame:
    """A trace as read back from CSV (no scenario config attached)."""

    t0: float
    dt: float
    f_hz: np.ndarray
    delta_f_pu: np.ndarray
    rocof_hz_s: np.ndarray
    p_thermal_pu: np.ndarray
    p_hydro_pu: np.ndarray
    p_wind_pu: np.ndarray
    p_load_pu: np.ndarray
    omega_wt_pu: np.ndarray
    mode: np.ndarray

    def __len__(self) -> int:
        return self.f_hz.shape[0]

    def f0_hz(self) -> float:
        """Nominal frequency recovered from the first sample (pre-event: delta_f = 0)."""
        return float(self.f_hz[0] / (1.0 + self.delta_f_pu[0]))


def write_trace(trace: SimulationTrace, path: str | Path) -> None:
    path = Path(path)
    times = trace.times()
    names = trace.mode_names()
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for i in range(len(trace)):
            writer.writerow(
                (
                    _fmt(times[i]),
                    _fmt(trace.f_hz[i]),
                    _fmt(trace.delta_f_pu[i]),
                    _fmt(trace.rocof_hz_s[i]),
                    _fmt(trace.p_thermal_pu[i]),
                    _fmt(trace.p_hydro_pu[i]),
                    _fmt(trace.p_wind_pu[i]),
                    _fmt(trace.p_load_pu[i]),
                    _fmt(trace.omega_wt_pu[i]),
                    names[i],
                )
            )


def read_trace(path: str | Path) -> TraceFrame:
    """Read a trace CSV, failing with the offending line/column named."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceFormatError(f"{path}: empty trace file") from None
        if tuple(header) != TRACE_COLUMNS:
            missing = set(TRACE_COLUMNS) - set(header)
            if missing:
                raise TraceFormatError(f"{path}: missing columns {sorted(missing)}")
            raise TraceFormatError(f"{path}: unexpected column order {header}")
        cols: list[list] = [[] for _ in TRACE_COLUMNS]
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(TRACE_COLUMNS):
                raise TraceFormatError(
                    f"{path}: line {lineno}: expected {len(TRACE_COLUMNS)} fields, got {len(row)}"
                )
            for j, cell in enumerate(row):
                if TRACE_COLUMNS[j] == "mode":
                    if cell not in _MODE_CODES:
                        raise TraceFormatError(
                            f"{path}: line {lineno}, column 'mode': unknown mode {cell!r}"
                        )
                    cols[j].append(_MODE_CODES[cell])
                else:
                    try:
                        cols[j].append(float(cell))
                    except ValueError:
                        raise TraceFormatError(
                            f"{path}: line {lineno}, column {TRACE_COLUMNS[j]!r}: "
                            f"not a number: {cell!r}"
                        ) from None
    if len(cols[0]) < 2:
        raise TraceFormatError(f"{path}: trace needs at least 2 samples, got {len(cols[0])}")
    t = np.asarray(cols[0])
    dt = float(t[1] - t[0])
    if dt <= 0.0 or not np.allclose(np.diff(t), dt, rtol=0.0, atol=1.0e-9):
        raise TraceFormatError(f"{path}: time column is not uniformly sampled")
    return TraceFrame(
        t0=float(t[0]),
        dt=dt,
        f_hz=np.asarray(cols[1]),
        delta_f_pu=np.asarray(cols[2]),
        rocof_hz_s=np.asarray(cols[3]),
        p_thermal_pu=np.asarray(cols[4]),
        p_hydro_pu=np.asarray(cols[5]),
        p_wind_pu=np.asarray(cols[6]),
        p_load_pu=np.asarray(cols[7]),
        omega_wt_pu=np.asarray(cols[8]),
        mode=np.asarray(cols[9], dtype=np.int8),
    )


def write_json(payload: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_report(path: str | Path) -> dict:
    """Read a sweep or estimate report, rejecting unknown schema versions and fields."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise TraceFormatError(f"{path}: report must be a JSON object")
    version = payload.get("schema_version")
    if version != REPORT_SCHEMA_VERSION:
        raise TraceFormatError(
            f"{path}: unsupported schema_version {version!r} (expected {REPORT_SCHEMA_VERSION})"
        )
    kind = payload.get("kind")
    allowed = {"sweep": _REPORT_KEYS, "estimate": _ESTIMATE_REPORT_KEYS}.get(kind)
    if allowed is None:
        raise TraceFormatError(f"{path}: unknown report kind {kind!r}")
    unknown = set(payload) - allowed
    if unknown:
        raise TraceFormatError(f"{path}: unknown report fields {sorted(unknown)}")
    return payload
