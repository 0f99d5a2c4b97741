"""Closed-loop simulation of the aggregated swing equation with all plant injections.

One equivalent thermal plant, one hydro plant and one equivalent wind turbine feed the
single-bus swing equation

    d(delta_f)/dt = (dp_mech - dp_load_step - D * delta_f) / (2 * H_eq)

in per-unit.  H_eq is the rotational aggregate of the synchronous units only; the wind
plant contributes purely through its power injection (its physical inertia is hidden
behind the converter).  Fixed-step classical RK4; the wind controller's discrete mode
is advanced once per step and held fixed across the four stages.

State vector (12 floats):
    [delta_f, thermal(3), hydro(3), xi_secondary, omega, pi_wind, i_inj, p_meas]
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import PerUnitSystem, PlantShare, TimeSeries, aggregate_rotational_inertia
from .errors import SimulationDiverged
from .plants import (
    HydroParams,
    HydroState,
    LoadParams,
    ThermalParams,
    ThermalState,
    hydro_derivatives,
    load_power,
    thermal_derivatives,
)
from .wind import (
    Mode,
    WindParams,
    WindState,
    command_power,
    controller_step,
    initial_wind_state,
    wind_derivatives,
)

__all__ = [
    "GenerationShares",
    "NoiseSpec",
    "ScenarioConfig",
    "SimulationTrace",
    "swing_step",
    "simulate",
    "rocof_metric",
    "scenario_preset",
    "SCENARIO_SHARES",
]

# Table of scenario generation mixes: thermal / hydro / wind fractions of the base.
SCENARIO_SHARES = {
    1: (0.88, 0.12, 0.00),
    2: (0.73, 0.12, 0.15),
    3: (0.58, 0.12, 0.30),
    4: (0.43, 0.12, 0.45),
}

MODE_CODES = {Mode.NORMAL: 0, Mode.OVERPRODUCTION: 1, Mode.RECOVERY: 2}
MODE_NAMES = {0: "normal", 1: "overproduction", 2: "recovery"}


@dataclass(frozen=True)
class GenerationShares:
    thermal: float
    hydro: float
    wind: float

    def __post_init__(self):
        for name in ("thermal", "hydro", "wind"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} share must be >= 0")
        if abs(self.thermal + self.hydro + self.wind - 1.0) > 1.0e-9:
            raise ValueError(
                f"shares must sum to 1, got {self.thermal + self.hydro + self.wind}"
            )

    @property
    def synchronous(self) -> float:
        return self.thermal + self.hydro


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian measurement noise added to the recorded frequency (not the dynamics)."""

    sigma_hz: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma_hz < 0.0:
            raise ValueError(f"sigma_hz must be >= 0, got {self.sigma_hz}")


@dataclass(frozen=True)
class ScenarioConfig:
    shares: GenerationShares
    wind_control: bool = False
    thermal: ThermalParams = field(default_factory=ThermalParams)
    hydro: HydroParams = field(default_factory=HydroParams)
    wind: WindParams = field(default_factory=WindParams)
    load: LoadParams = field(default_factory=LoadParams)
    pu: PerUnitSystem = field(default_factory=PerUnitSystem)
    dt: float = 0.01
    duration: float = 150.0
    noise: Optional[NoiseSpec] = None

    def __post_init__(self):
        if not 0.0 < self.dt <= 0.05:
            raise ValueError(f"dt must be in (0, 0.05], got {self.dt}")
        if self.duration <= self.load.t_dist:
            raise ValueError(
                f"duration ({self.duration}) must exceed t_dist ({self.load.t_dist})"
            )

    def rotational_inertia(self) -> float:
        """Equivalent rotational inertia of the synchronous units (wind counts as H=0)."""
        mix = [
            PlantShare(self.thermal.h_s, self.shares.thermal),
            PlantShare(self.hydro.h_s, self.shares.hydro),
            PlantShare(0.0, self.shares.wind),
        ]
        return aggregate_rotational_inertia(mix)


@dataclass
class SimulationTrace:
    """Synchronized per-step record of the simulation outputs.

    All arrays share t0/dt/length; f_hz = f0 * (1 + delta_f_pu).  Powers are system-base
    per-unit deviations; p_load_pu is the total load deviation including the damping term.
    """

    t0: float
    dt: float
    f0_hz: float
    h_rotational_s: float
    t_dist_s: float
    f_hz: np.ndarray
    delta_f_pu: np.ndarray
    rocof_hz_s: np.ndarray
    p_thermal_pu: np.ndarray
    p_hydro_pu: np.ndarray
    p_wind_pu: np.ndarray
    p_load_pu: np.ndarray
    omega_wt_pu: np.ndarray
    mode: np.ndarray  # int8 codes, see MODE_NAMES
    config: Optional[ScenarioConfig] = None

    def __len__(self) -> int:
        return self.f_hz.shape[0]

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    def series(self, name: str) -> TimeSeries:
        return TimeSeries(self.t0, self.dt, getattr(self, name))

    def mode_names(self) -> list[str]:
        return [MODE_NAMES[int(m)] for m in self.mode]

    def nadir_hz(self) -> float:
        """Lowest absolute frequency reached, Hz."""
        return float(np.min(self.f_hz))

    def total_generation_pu(self) -> np.ndarray:
        return self.p_thermal_pu + self.p_hydro_pu + self.p_wind_pu


def swing_step(
    delta_f: float, dp_mech: float, dp_load: float, h_eq: float, damping: float = 1.0
) -> float:
    """Frequency-deviation rate from the power balance: (dp_m - dp_l - D*df) / (2*H)."""
    if h_eq <= 0.0:
        raise ValueError(f"h_eq must be > 0, got {h_eq}")
    return (dp_mech - dp_load - damping * delta_f) / (2.0 * h_eq)


def scenario_preset(n: int, wind_control: bool = False) -> ScenarioConfig:
    """Scenario 1..4 generation mixes (hydro fixed at 12%, wind replacing thermal)."""
    if n not in SCENARIO_SHARES:
        raise ValueError(f"scenario must be in 1..4, got {n}")
    th, hy, wi = SCENARIO_SHARES[n]
    return ScenarioConfig(shares=GenerationShares(th, hy, wi), wind_control=wind_control)


def _rhs(t, y, cfg, wind_ctrl, h_eq, sec_gain, share_sync):
    """Derivatives plus recorded outputs at (t, y) with the wind mode held fixed.

    Returns (dy tuple, outputs tuple); outputs are
    (rocof_pu_s, dp_t_sys, dp_h_sys, dp_w_sys, dp_load_total).
    """
    delta_f = y[0]
    th_state = ThermalState(y[1], y[2], y[3])
    hy_state = HydroState(y[4], y[5], y[6])
    xi = y[7]

    u_ref = xi / share_sync if share_sync > 0.0 else 0.0
    d_th, dp_t = thermal_derivatives(th_state, delta_f, cfg.thermal, u_ref)
    d_hy, dp_h = hydro_derivatives(hy_state, delta_f, cfg.hydro, u_ref)
    d_xi = -sec_gain * delta_f

    wstate = wind_ctrl.with_continuous(y[8], y[9], y[10], y[11])
    delta_f_hz = delta_f * cfg.pu.f0_hz
    p_cmd = command_power(wstate, delta_f_hz, cfg.wind)
    d_wind, p_e = wind_derivatives(wstate, p_cmd, cfg.wind)

    dp_t_sys = cfg.shares.thermal * dp_t
    dp_h_sys = cfg.shares.hydro * dp_h
    dp_w_sys = cfg.shares.wind * (p_e - cfg.wind.p0)
    dp_load = load_power(delta_f, t, cfg.load)
    step = cfg.load.delta_p_l if t >= cfg.load.t_dist else 0.0
    d_f = swing_step(delta_f, dp_t_sys + dp_h_sys + dp_w_sys, step, h_eq, cfg.load.d)

    dy = (
        d_f,
        d_th[0], d_th[1], d_th[2],
        d_hy[0], d_hy[1], d_hy[2],
        d_xi,
        d_wind[0], d_wind[1], d_wind[2], d_wind[3],
    )
    return dy, (d_f, dp_t_sys, dp_h_sys, dp_w_sys, dp_load)


def simulate(config: ScenarioConfig) -> SimulationTrace:
    """Run the scenario and return the full trace.

    Pre-disturbance the model sits at an exact equilibrium (delta_f is identically 0);
    the load step fires at t_dist.  Raises SimulationDiverged if any state goes
    non-finite.
    """
    cfg = config
    dt = cfg.dt
    n = int(round(cfg.duration / dt)) + 1
    h_eq = cfg.rotational_inertia()
    share_sync = cfg.shares.synchronous
    sec_gain = 0.5 * (cfg.thermal.k_i + cfg.hydro.k_i)
    f0 = cfg.pu.f0_hz

    f_hz = np.empty(n)
    delta_f_pu = np.empty(n)
    rocof = np.empty(n)
    p_t = np.empty(n)
    p_h = np.empty(n)
    p_w = np.empty(n)
    p_l = np.empty(n)
    omega_arr = np.empty(n)
    mode_arr = np.empty(n, dtype=np.int8)

    wind_ctrl = initial_wind_state(cfg.wind)
    control_active = cfg.wind_control and cfg.shares.wind > 0.0
    y = (
        0.0,
        0.0, 0.0, 0.0,
        0.0, 0.0, 0.0,
        0.0,
    ) + wind_ctrl.continuous()

    half = dt / 2.0
    sixth = dt / 6.0
    for k in range(n):
        t = k * dt
        if control_active:
            wstate = wind_ctrl.with_continuous(y[8], y[9], y[10], y[11])
            _, wind_ctrl = controller_step(wstate, y[0] * f0, cfg.wind)
            if wind_ctrl.mode is not wstate.mode and wind_ctrl.pi_state != wstate.pi_state:
                y = y[:9] + (wind_ctrl.pi_state,) + y[10:]

        k1, out = _rhs(t, y, cfg, wind_ctrl, h_eq, sec_gain, share_sync)

        delta_f_pu[k] = y[0]
        f_hz[k] = f0 * (1.0 + y[0])
        rocof[k] = out[0] * f0
        p_t[k] = out[1]
        p_h[k] = out[2]
        p_w[k] = out[3]
        p_l[k] = out[4]
        omega_arr[k] = y[8]
        mode_arr[k] = MODE_CODES[wind_ctrl.mode]

        if k == n - 1:
            break

        y2 = tuple(yi + half * ki for yi, ki in zip(y, k1))
        k2, _ = _rhs(t + half, y2, cfg, wind_ctrl, h_eq, sec_gain, share_sync)
        y3 = tuple(yi + half * ki for yi, ki in zip(y, k2))
        k3, _ = _rhs(t + half, y3, cfg, wind_ctrl, h_eq, sec_gain, share_sync)
        y4 = tuple(yi + dt * ki for yi, ki in zip(y, k3))
        k4, _ = _rhs(t + dt, y4, cfg, wind_ctrl, h_eq, sec_gain, share_sync)
        y = tuple(
            yi + sixth * (a + 2.0 * b + 2.0 * c + d)
            for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
        )
        if not all(math.isfinite(v) for v in y):
            raise SimulationDiverged(f"non-finite state at t={t + dt:.3f} s")

    if cfg.noise is not None and cfg.noise.sigma_hz > 0.0:
        rng = np.random.default_rng(cfg.noise.seed)
        eps_hz = rng.normal(0.0, cfg.noise.sigma_hz, size=n)
        delta_f_pu = delta_f_pu + eps_hz / f0
        f_hz = f0 * (1.0 + delta_f_pu)

    return SimulationTrace(
        t0=0.0,
        dt=dt,
        f0_hz=f0,
        h_rotational_s=h_eq,
        t_dist_s=cfg.load.t_dist,
        f_hz=f_hz,
        delta_f_pu=delta_f_pu,
        rocof_hz_s=rocof,
        p_thermal_pu=p_t,
        p_hydro_pu=p_h,
        p_wind_pu=p_w,
        p_load_pu=p_l,
        omega_wt_pu=omega_arr,
        mode=mode_arr,
        config=cfg,
    )


def rocof_metric(trace: SimulationTrace, window_s: float = 0.5) -> float:
    """Mean df/dt over [t_dist, t_dist + window], in mHz/s."""
    if window_s <= 0.0:
        raise ValueError(f"window_s must be > 0, got {window_s}")
    i0 = int(round((trace.t_dist_s - trace.t0) / trace.dt))
    i1 = int(round((trace.t_dist_s + window_s - trace.t0) / trace.dt))
    if i0 < 0 or i1 >= len(trace):
        raise ValueError("ROCOF window falls outside the trace")
    return float(np.mean(trace.rocof_hz_s[i0 : i1 + 1]) * 1000.0)
