import numpy as np
import pytest

import gridfreq as gf
from gridfreq.core import TimeSeries

F0 = 50.0
T_DIST = 50.0
DP_LOAD = 0.05


@pytest.fixture(scope="session")
def traces():
    """The eight standard traces (scenarios 1..4 x wind control off/on), run once."""
    out = {}
    for control in (False, True):
        for n in (1, 2, 3, 4):
            out[(n, control)] = gf.simulate(gf.scenario_preset(n, wind_control=control))
    return out


def pure_swing_delta_f(h, dp_load=0.05, t_dist=5.0, duration=25.0, dt=0.01):
    """Analytic pure-swing deviation trace (no governors, D = 0): a ramp after t_dist.

    Built from the closed-form solution, independent of the simulator.
    """
    n = round(duration / dt) + 1
    t = np.arange(n) * dt
    slope = -dp_load / (2.0 * h)
    values = np.where(t >= t_dist, slope * (t - t_dist), 0.0)
    return TimeSeries(0.0, dt, values)


def pure_swing_trace(h, dp_load=0.05, t_dist=5.0, duration=25.0, dt=0.01, f0=F0):
    """Pure-swing SimulationTrace for metric-level tests, from the same closed form."""
    f_pu = pure_swing_delta_f(h, dp_load, t_dist, duration, dt)
    n = len(f_pu)
    t = f_pu.times()
    slope = -dp_load / (2.0 * h)
    rocof = np.where(t >= t_dist, slope * f0, 0.0)
    zeros = np.zeros(n)
    return gf.SimulationTrace(
        t0=0.0,
        dt=dt,
        f0_hz=f0,
        h_rotational_s=h,
        t_dist_s=t_dist,
        f_hz=f0 * (1.0 + f_pu.values),
        delta_f_pu=f_pu.values.copy(),
        rocof_hz_s=rocof,
        p_thermal_pu=zeros.copy(),
        p_hydro_pu=zeros.copy(),
        p_wind_pu=zeros.copy(),
        p_load_pu=np.where(t >= t_dist, dp_load, 0.0),
        omega_wt_pu=np.full(n, 1.0),
        mode=np.zeros(n, dtype=np.int8),
    )
