"""Shared domain types: per-unit bases, uniformly sampled series, inertia aggregation.

Conventions used throughout the package:
  * powers are per-unit on the system base unless a function says otherwise,
  * frequency deviations are per-unit of nominal (delta_f = (f - f0)/f0),
  * inertia constants H are in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "PerUnitSystem",
    "PhysicalRotor",
    "PlantShare",
    "TimeSeries",
    "kinetic_energy",
    "inertia_constant",
    "aggregate_rotational_inertia",
    "aggregate_with_virtual",
    "derivative",
    "moving_average",
]


@dataclass(frozen=True)
class PerUnitSystem:
    """System base quantities: apparent power base (MW) and nominal frequency (Hz)."""

    s_base_mw: float = 1350.0
    f0_hz: float = 50.0

    def __post_init__(self):
        if self.s_base_mw <= 0.0:
            raise ValueError(f"s_base_mw must be > 0, got {self.s_base_mw}")
        if self.f0_hz <= 0.0:
            raise ValueError(f"f0_hz must be > 0, got {self.f0_hz}")


@dataclass(frozen=True)
class PhysicalRotor:
    """A physical rotating mass: moment of inertia, rated speed and rated power."""

    j_kgm2: float
    f_m_hz: float
    s_r_va: float

    def __post_init__(self):
        if self.j_kgm2 < 0.0:
            raise ValueError(f"j_kgm2 must be >= 0, got {self.j_kgm2}")
        if self.f_m_hz <= 0.0:
            raise ValueError(f"f_m_hz must be > 0, got {self.f_m_hz}")
        if self.s_r_va <= 0.0:
            raise ValueError(f"s_r_va must be > 0, got {self.s_r_va}")


@dataclass(frozen=True)
class PlantShare:
    """Inertia constant of one plant and its fraction of the system base."""

    h_s: float
    share: float

    def __post_init__(self):
        if self.h_s < 0.0:
            raise ValueError(f"h_s must be >= 0, got {self.h_s}")
        if not 0.0 <= self.share <= 1.0:
            raise ValueError(f"share must be in [0, 1], got {self.share}")


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real signal.  The unit is carried by context (Hz, pu, Hz/s).

    Samples must be finite; series with flagged gaps (NaN where a value is undefined,
    e.g. an estimator output outside its validity window) must say so explicitly with
    allow_gaps=True.
    """

    t0: float
    dt: float
    values: np.ndarray
    allow_gaps: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if self.dt <= 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if vals.ndim != 1:
            raise ValueError(f"values must be 1-D, got shape {vals.shape}")
        if self.allow_gaps:
            if np.any(np.isinf(vals)):
                raise ValueError("values must not be infinite")
        elif not np.all(np.isfinite(vals)):
            raise ValueError("values must all be finite")

    def __len__(self) -> int:
        return self.values.shape[0]

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    def index_at(self, t: float) -> int:
        """Index of the sample closest to time t (must fall inside the series)."""
        i = int(round((t - self.t0) / self.dt))
        if i < 0 or i >= len(self):
            raise ValueError(f"time {t} outside series [{self.t0}, {self.t0 + self.dt * (len(self) - 1)}]")
        return i

    def slice_time(self, t_start: float, t_end: float) -> "TimeSeries":
        i0 = self.index_at(t_start)
        i1 = self.index_at(t_end)
        if i1 <= i0:
            raise ValueError(f"empty slice [{t_start}, {t_end}]")
        return TimeSeries(self.t0 + i0 * self.dt, self.dt, self.values[i0 : i1 + 1])

    def decimate(self, stride: int) -> "TimeSeries":
        if stride < 1:
            raise ValueError(f"stride must be >= 1, got {stride}")
        return TimeSeries(self.t0, self.dt * stride, self.values[::stride])


def kinetic_energy(rotor: PhysicalRotor) -> float:
    """Kinetic energy stored in the rotating mass, in joules: E = J*(2*pi*f_m)^2 / 2."""
    return 0.5 * rotor.j_kgm2 * (2.0 * math.pi * rotor.f_m_hz) ** 2


def inertia_constant(rotor: PhysicalRotor) -> float:
    """Inertia constant in seconds: stored kinetic energy over rated power."""
    return kinetic_energy(rotor) / rotor.s_r_va


def aggregate_rotational_inertia(mix: Sequence[PlantShare] | Iterable[PlantShare]) -> float:
    """Capacity-weighted inertia of directly connected units: sum H_i * share_i."""
    mix = list(mix)
    if not mix:
        raise ValueError("generation mix is empty")
    return float(sum(p.h_s * p.share for p in mix))


def aggregate_with_virtual(
    rotational: Sequence[PlantShare] | Iterable[PlantShare],
    virtual: Sequence[PlantShare] | Iterable[PlantShare],
) -> float:
    """Combined inertia of rotational units and converter plants emulating inertia."""
    rotational = list(rotational)
    virtual = list(virtual)
    if not rotational and not virtual:
        raise ValueError("generation mix is empty")
    total = 0.0
    for p in rotational:
        total += p.h_s * p.share
    for p in virtual:
        total += p.h_s * p.share
    return float(total)


def derivative(ts: TimeSeries) -> TimeSeries:
    """Numerical time derivative: central differences inside, one-sided at the edges."""
    v = ts.values
    n = len(v)
    if n < 2:
        raise ValueError("need at least 2 samples to differentiate")
    out = np.empty(n)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * ts.dt)
    out[0] = (v[1] - v[0]) / ts.dt
    out[-1] = (v[-1] - v[-2]) / ts.dt
    return TimeSeries(ts.t0, ts.dt, out)


def moving_average(ts: TimeSeries, width_s: float) -> TimeSeries:
    """Centered moving average of total width width_s; the window shrinks at the edges.

    The sample count is rounded to the nearest odd number so the filter has no phase lag.
    """
    if width_s <= 0.0:
        raise ValueError(f"width_s must be > 0, got {width_s}")
    w = max(1, int(round(width_s / ts.dt)))
    if w % 2 == 0:
        w += 1
    if w == 1:
        return TimeSeries(ts.t0, ts.dt, ts.values.copy())
    half = w // 2
    n = len(ts)
    csum = np.concatenate(([0.0], np.cumsum(ts.values)))
    idx = np.arange(n)
    lo = np.maximum(0, idx - half)
    hi = np.minimum(n, idx + half + 1)
    out = (csum[hi] - csum[lo]) / (hi - lo)
    return TimeSeries(ts.t0, ts.dt, out)
