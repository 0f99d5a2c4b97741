"""Equivalent variable-speed wind turbine with a fast-power-reserve frequency controller.

Single-mass rotor behind a converter, in per-unit on the wind plant base.  Three
curves describe the turbine at a fixed wind speed:

  * ``p_mppt(omega)``    the tracking law k_opt * omega^3 the converter follows,
  * ``p_mech(omega)``    the available aerodynamic power, peaked at the optimum speed
                         (above the cubic law below the optimum, equal at it),
  * the recovery law     p_mppt + x * (p_mech - p_mppt), between the two.

The controller cycles Normal -> Overproduction -> Recovery -> Normal.  Overproduction
adds k_op * |delta_f| on top of the moving mechanical-power curve, paid for from rotor
kinetic energy.  Recovery drops the command onto the proportional law, rides a parabola
(vertex at the halfway speed) and then the proportional law back to the tracking point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

from .errors import SimulationDiverged


class Mode(enum.Enum):
    NORMAL = "normal"
    OVERPRODUCTION = "overproduction"
    RECOVERY = "recovery"


# Ω_min guard margin: fires slightly early so the converter lag cannot drag the rotor
# below omega_min between controller samples.
_OMEGA_EXIT_MARGIN = 1.0e-3
# Recovery -> Normal hand-back tolerances (Eq. "≈" conditions).
_OMEGA_HOME_TOL = 5.0e-3
_POWER_HOME_TOL = 2.0e-3


@dataclass(frozen=True)
class WindParams:
    """Equivalent wind turbine constants (wind plant base)."""

    v_w: float = 10.0          # wind speed, m/s
    k_pt: float = 3.0          # speed-PI proportional gain
    k_it: float = 0.6          # speed-PI integral gain
    v_wt: float = 1.0          # terminal voltage, pu
    t_con: float = 0.02        # current injection delay, s
    t_f: float = 5.0           # power measurement filter, s
    h_wt: float = 5.29         # rotor inertia constant, s
    k_opt: float = 1.0         # tracking-law cubic coefficient, pu
    v_rated: float = 12.0      # rated wind speed, m/s
    k_shape: float = 1.0       # aerodynamic curve curvature
    omega_min: float = 0.70    # minimum allowed rotor speed, pu
    delta_f_lim: float = 0.10  # activation threshold, Hz
    k_op: float = 0.15         # overproduction gain, pu per Hz
    x_recovery: float = 0.5    # recovery proportionality constant

    def __post_init__(self):
        for name in ("t_con", "t_f", "h_wt", "v_w", "v_rated", "v_wt", "k_opt"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 < self.omega_min < 1.0:
            raise ValueError(f"omega_min must be in (0, 1), got {self.omega_min}")
        if self.delta_f_lim <= 0.0:
            raise ValueError(f"delta_f_lim must be > 0, got {self.delta_f_lim}")
        if not 0.0 < self.x_recovery <= 1.0:
            raise ValueError(f"x_recovery must be in (0, 1], got {self.x_recovery}")
        if self.k_op < 0.0:
            raise ValueError(f"k_op must be >= 0, got {self.k_op}")

    @property
    def omega_mppt(self) -> float:
        """Tracking-point rotor speed for the configured wind speed, pu.

        Defined through the same cube/cube-root round trip the speed-reference lookup
        uses, so the pre-event operating point is an exact float equilibrium.
        """
        raw = min(1.0, max(self.omega_min, self.v_w / self.v_rated))
        return (self.k_opt * raw**3 / self.k_opt) ** (1.0 / 3.0)

    @property
    def p0(self) -> float:
        """Pre-event operating power P_MPPT(v_w), pu."""
        raw = min(1.0, max(self.omega_min, self.v_w / self.v_rated))
        return self.k_opt * raw**3


class Parabola(NamedTuple):
    """Recovery trajectory coefficients: p(omega) = a*omega^2 + b*omega + c."""

    a: float
    b: float
    c: float

    def __call__(self, omega: float) -> float:
        return self.a * omega * omega + self.b * omega + self.c


@dataclass(frozen=True)
class WindState:
    """Continuous turbine states plus the controller's discrete mode and recovery data."""

    omega: float               # rotor speed, pu
    pi_state: float            # speed-controller integrator, pu
    i_inj: float               # injected current (lagging the command), pu
    p_meas: float              # filtered electric power, pu
    mode: Mode = Mode.NORMAL
    omega_v: Optional[float] = None        # recovery midpoint target, pu
    parabola: Optional[Parabola] = None

    def continuous(self) -> tuple[float, float, float, float]:
        return (self.omega, self.pi_state, self.i_inj, self.p_meas)

    def with_continuous(self, omega, pi_state, i_inj, p_meas) -> "WindState":
        return replace(self, omega=omega, pi_state=pi_state, i_inj=i_inj, p_meas=p_meas)


def initial_wind_state(params: WindParams) -> WindState:
    """Equilibrium at the tracking point: all derivatives are exactly zero."""
    return WindState(
        omega=params.omega_mppt,
        pi_state=0.0,
        i_inj=params.p0 / params.v_wt,
        p_meas=params.p0,
        mode=Mode.NORMAL,
    )


def p_mppt(omega: float, params: WindParams) -> float:
    """Tracking-law power at rotor speed omega: k_opt * omega^3 clipped to [0, 1]."""
    if omega <= 0.0:
        return 0.0
    return min(1.0, params.k_opt * omega**3)


def p_mech(omega: float, params: WindParams) -> float:
    """Available aerodynamic power at the configured wind speed, as a function of speed."""
    om = params.omega_mppt
    rel = (omega - om) / om
    return max(0.0, params.p0 * (1.0 - params.k_shape * rel * rel))


def recovery_law(omega: float, params: WindParams) -> float:
    """Proportional recovery command between the tracking law and the aero curve."""
    base = p_mppt(omega, params)
    return base + params.x_recovery * (p_mech(omega, params) - base)


def speed_reference(p_meas: float, params: WindParams) -> float:
    """Speed reference from the measured power, inverting the tracking law."""
    ref = (max(0.0, p_meas) / params.k_opt) ** (1.0 / 3.0)
    return min(1.0, max(params.omega_min, ref))


def build_recovery_parabola(
    omega_entry: float, p_entry: float, omega_v: float, params: WindParams
) -> Parabola:
    """Parabola through (omega_entry, p_entry) with its vertex on the recovery law at omega_v.

    Three constraints: interpolate the entry point, match the proportional law's value at
    omega_v, zero slope at omega_v (smooth hand-off onto the second recovery piece).
    """
    if abs(omega_v - omega_entry) < 1.0e-9:
        raise ValueError("degenerate recovery parabola: omega_entry == omega_v")
    p_target = recovery_law(omega_v, params)
    a = (p_entry - p_target) / (omega_entry - omega_v) ** 2
    b = -2.0 * a * omega_v
    c = p_target + a * omega_v * omega_v
    return Parabola(a, b, c)


def command_power(state: WindState, delta_f_hz: float, params: WindParams) -> float:
    """Commanded active power for the controller's current mode (mode held fixed)."""
    if state.mode is Mode.NORMAL:
        trim = params.k_pt * (state.omega - speed_reference(state.p_meas, params)) + state.pi_state
        return params.p0 + trim
    if state.mode is Mode.OVERPRODUCTION:
        dp_op = params.k_op * max(0.0, -delta_f_hz)
        return p_mech(state.omega, params) + dp_op
    # recovery
    if state.omega <= state.omega_v:
        return state.parabola(state.omega)
    return recovery_law(state.omega, params)


def controller_step(
    state: WindState, delta_f_hz: float, params: WindParams
) -> tuple[float, WindState]:
    """Apply the mode-transition predicates, then return (commanded power, next state).

    The admissible transitions form the single cycle
    Normal -> Overproduction -> Recovery -> Normal.  Once in overproduction the
    |delta_f| threshold no longer matters: only the speed/command guards exit.
    """
    mode = state.mode
    new_state = state

    if mode is Mode.NORMAL:
        if -delta_f_hz > params.delta_f_lim:  # under-frequency events only
            new_state = replace(state, mode=Mode.OVERPRODUCTION, omega_v=None, parabola=None)
    elif mode is Mode.OVERPRODUCTION:
        p_cmd_op = command_power(state, delta_f_hz, params)
        hit_floor = state.omega <= params.omega_min + _OMEGA_EXIT_MARGIN
        below_pre_event = p_cmd_op < params.p0
        if hit_floor or below_pre_event:
            omega_entry = state.omega
            if omega_entry >= params.omega_mppt - 1.0e-9:
                new_state = replace(state, mode=Mode.NORMAL, pi_state=0.0,
                                    omega_v=None, parabola=None)
            else:
                omega_v = 0.5 * (omega_entry + params.omega_mppt)
                p_entry = recovery_law(omega_entry, params)
                parab = build_recovery_parabola(omega_entry, p_entry, omega_v, params)
                new_state = replace(state, mode=Mode.RECOVERY, omega_v=omega_v, parabola=parab)
    else:  # recovery
        p_cmd_rec = command_power(state, delta_f_hz, params)
        home_speed = state.omega >= params.omega_mppt - _OMEGA_HOME_TOL
        home_power = state.omega > state.omega_v and abs(p_cmd_rec - params.p0) <= _POWER_HOME_TOL
        if home_speed or home_power:
            new_state = replace(state, mode=Mode.NORMAL, pi_state=0.0,
                                omega_v=None, parabola=None)

    return command_power(new_state, delta_f_hz, params), new_state


def wind_derivatives(
    state: WindState, p_cmd: float, params: WindParams
) -> tuple[tuple[float, float, float, float], float]:
    """Continuous-state derivatives and delivered electric power for a given command.

    Rotor swing in power form: 2*h_wt*omega*d(omega)/dt = p_mech - p_e.  The speed PI
    integrator only runs in normal mode; the converter current lags the command by t_con
    and the power measurement is filtered with t_f.
    """
    omega, pi_state, i_inj, p_meas = state.continuous()
    if omega <= 0.0:
        raise SimulationDiverged(f"rotor speed collapsed to {omega} pu")
    p_e = params.v_wt * i_inj
    d_omega = (p_mech(omega, params) - p_e) / (2.0 * params.h_wt * omega)
    if state.mode is Mode.NORMAL:
        d_pi = params.k_it * (omega - speed_reference(p_meas, params))
    else:
        d_pi = 0.0
    d_i = (p_cmd / params.v_wt - i_inj) / params.t_con
    d_pm = (p_e - p_meas) / params.t_f
    return (d_omega, d_pi, d_i, d_pm), p_e
