"""Conventional-unit dynamics: reheat thermal and hydro governor/turbine blocks, plus load.

Both plants are deviation models in per-unit on their own machine base: zero state with
zero input is an exact equilibrium.  State layout is one state per first-order block so
every internal signal stays observable for testing.

Thermal chain (speed relay -> steam chest -> reheater split):

    u --(1/(1+s*T_G))--> x_gov --(1/(1+s*T_CH))--> x_ch
    dp = F_HP * x_ch + (1-F_HP) * x_rh,   x_rh = x_ch / (1+s*T_RH)

which realizes the reheat turbine (1+s*F_HP*T_RH)/((1+s*T_RH)(1+s*T_CH)) behind the
governor lag.  Hydro chain (pilot valve -> transient-droop compensator -> water column):

    u --(1/(1+s*T_G))--> x_pilot --((1+s*T_R)/(1+s*(R_T/R_P)*T_R))--> gate
    dp = gate * (1-s*T_W)/(1+0.5*s*T_W)   (non-minimum phase)

The governor input in both cases is u = -delta_f/R + u_ref, where u_ref is the secondary
set-point correction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple


@dataclass(frozen=True)
class ThermalParams:
    """Reheat thermal plant constants (per-unit on the machine base)."""

    t_g: float = 0.20        # speed relay pilot valve, s
    f_hp: float = 0.30       # high-pressure power fraction
    t_rh: float = 7.00       # reheater time constant, s
    t_ch: float = 0.30       # steam chest / inlet volumes, s
    r_t: float = 0.05        # speed droop, pu
    k_i: float = 1.00        # integral (secondary) controller gain
    h_s: float = 5.00        # inertia constant, s

    def __post_init__(self):
        for name in ("t_g", "t_rh", "t_ch"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 < self.f_hp < 1.0:
            raise ValueError(f"f_hp must be in (0, 1), got {self.f_hp}")
        if self.r_t <= 0.0:
            raise ValueError(f"r_t must be > 0, got {self.r_t}")
        if self.h_s < 0.0:
            raise ValueError(f"h_s must be >= 0, got {self.h_s}")


@dataclass(frozen=True)
class HydroParams:
    """Hydro plant constants with transient-droop compensation (machine base)."""

    t_g: float = 0.20        # speed relay pilot valve, s
    t_r: float = 5.00        # reset time, s
    r_t: float = 0.38        # temporary droop
    r_p: float = 0.05        # permanent droop
    t_w: float = 1.00        # water starting time, s
    r_h: float = 0.05        # speed droop, pu
    k_i: float = 1.00        # integral (secondary) controller gain
    h_s: float = 10.0 / 3.0  # inertia constant, s (3.33; forced by the scenario totals)

    def __post_init__(self):
        for name in ("t_g", "t_r", "t_w"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if not self.r_t > self.r_p > 0.0:
            raise ValueError(f"need r_t > r_p > 0, got r_t={self.r_t}, r_p={self.r_p}")
        if self.r_h <= 0.0:
            raise ValueError(f"r_h must be > 0, got {self.r_h}")
        if self.h_s < 0.0:
            raise ValueError(f"h_s must be >= 0, got {self.h_s}")

    @property
    def t_compensator(self) -> float:
        """Denominator time constant of the transient-droop lead-lag, (R_T/R_P)*T_R."""
        return (self.r_t / self.r_p) * self.t_r


@dataclass(frozen=True)
class LoadParams:
    """Frequency-dependent load and the step disturbance definition."""

    d: float = 1.0             # damping, pu_MW / pu_Hz
    delta_p_l: float = 0.05    # load step magnitude, pu (positive = load increase)
    t_dist: float = 50.0       # disturbance time, s

    def __post_init__(self):
        if self.d < 0.0:
            raise ValueError(f"d must be >= 0, got {self.d}")


class ThermalState(NamedTuple):
    """(governor valve, steam chest, reheater) states, pu deviations."""

    x_gov: float = 0.0
    x_ch: float = 0.0
    x_rh: float = 0.0


class HydroState(NamedTuple):
    """(pilot valve, droop compensator, water column) states, pu deviations."""

    x_pilot: float = 0.0
    x_comp: float = 0.0
    x_water: float = 0.0


def thermal_derivatives(
    state: ThermalState,
    delta_f: float,
    params: ThermalParams,
    u_ref: float = 0.0,
) -> tuple[ThermalState, float]:
    """State derivatives and mechanical power deviation of the reheat thermal plant.

    delta_f is the frequency deviation in pu; u_ref is the secondary set-point input
    in machine pu.  Returns (d state / dt, delta_p_mech).
    """
    x_gov, x_ch, x_rh = state
    u = -delta_f / params.r_t + u_ref
    d_gov = (u - x_gov) / params.t_g
    d_ch = (x_gov - x_ch) / params.t_ch
    d_rh = (x_ch - x_rh) / params.t_rh
    dp = params.f_hp * x_ch + (1.0 - params.f_hp) * x_rh
    return ThermalState(d_gov, d_ch, d_rh), dp


def hydro_derivatives(
    state: HydroState,
    delta_f: float,
    params: HydroParams,
    u_ref: float = 0.0,
) -> tuple[HydroState, float]:
    """State derivatives and mechanical power deviation of the hydro plant.

    The water column (1-s*T_W)/(1+0.5*s*T_W) makes the response non-minimum phase:
    a gate opening first pulls power down before it rises.
    """
    x_pilot, x_comp, x_water = state
    u = -delta_f / params.r_h + u_ref
    d_pilot = (u - x_pilot) / params.t_g
    t2 = params.t_compensator
    d_comp = (x_pilot - x_comp) / t2
    lead = params.t_r / t2
    gate = lead * x_pilot + (1.0 - lead) * x_comp
    half_tw = 0.5 * params.t_w
    d_water = (gate - x_water) / half_tw
    dp = 3.0 * x_water - 2.0 * gate
    return HydroState(d_pilot, d_comp, d_water), dp


def hydro_gate(state: HydroState, params: HydroParams) -> float:
    """Gate position implied by the governor states (lead-lag output)."""
    lead = params.t_r / params.t_compensator
    return lead * state.x_pilot + (1.0 - lead) * state.x_comp


def load_power(delta_f: float, t: float, params: LoadParams) -> float:
    """Electrical load deviation: step disturbance plus frequency-dependent part."""
    step = params.delta_p_l if t >= params.t_dist else 0.0
    return step + params.d * delta_f
