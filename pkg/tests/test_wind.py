import numpy as np
import pytest

from gridfreq.errors import SimulationDiverged
from gridfreq.sim import MODE_CODES
from gridfreq.wind import (
    Mode,
    WindParams,
    WindState,
    build_recovery_parabola,
    command_power,
    controller_step,
    initial_wind_state,
    p_mech,
    p_mppt,
    recovery_law,
    wind_derivatives,
)

PARAMS = WindParams()


class TestParams:
    def test_table_defaults(self):
        p = PARAMS
        assert (p.v_w, p.k_pt, p.k_it, p.v_wt, p.t_con, p.t_f) == (
            10.0, 3.0, 0.6, 1.0, 0.02, 5.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            WindParams(omega_min=1.2)
        with pytest.raises(ValueError):
            WindParams(delta_f_lim=0.0)
        with pytest.raises(ValueError):
            WindParams(x_recovery=0.0)
        with pytest.raises(ValueError):
            WindParams(t_con=-0.1)

    def test_operating_point(self):
        # 10 m/s on a 12 m/s machine: five-sixths speed, cube-law power.
        assert PARAMS.omega_mppt == pytest.approx(10.0 / 12.0, rel=1e-12)
        assert PARAMS.p0 == pytest.approx((10.0 / 12.0) ** 3, rel=1e-12)


class TestCurves:
    def test_mppt_at_operating_point(self):
        assert p_mppt(PARAMS.omega_mppt, PARAMS) == pytest.approx(PARAMS.p0, rel=1e-12)

    def test_mppt_zero(self):
        assert p_mppt(0.0, PARAMS) == 0.0

    def test_cubic_law(self):
        assert p_mppt(0.2, PARAMS) == pytest.approx(8.0 * p_mppt(0.1, PARAMS), rel=1e-12)

    def test_mppt_clip(self):
        assert p_mppt(2.0, PARAMS) == 1.0

    def test_mech_peak_at_optimum(self):
        om = PARAMS.omega_mppt
        assert p_mech(om, PARAMS) == pytest.approx(PARAMS.p0, rel=1e-12)
        assert p_mech(om - 0.05, PARAMS) < PARAMS.p0
        assert p_mech(om + 0.05, PARAMS) < PARAMS.p0

    def test_mech_above_cubic_below_optimum(self):
        # The aero curve must sit above the tracking law below the optimum speed,
        # otherwise no recovery command could re-accelerate the rotor.
        for omega in np.linspace(PARAMS.omega_min, PARAMS.omega_mppt - 1e-6, 20):
            assert p_mech(omega, PARAMS) > p_mppt(omega, PARAMS)


class TestRecoveryParabola:
    def test_degenerate_speeds(self):
        with pytest.raises(ValueError):
            build_recovery_parabola(0.75, 0.5, 0.75, PARAMS)

    def test_constraint_residuals(self):
        omega_e, omega_v = 0.70, 0.77
        p_entry = recovery_law(omega_e, PARAMS)
        par = build_recovery_parabola(omega_e, p_entry, omega_v, PARAMS)
        # all three defining constraints hold to machine precision
        assert par(omega_e) == pytest.approx(p_entry, abs=1e-14)
        assert par(omega_v) == pytest.approx(recovery_law(omega_v, PARAMS), abs=1e-14)
        assert 2.0 * par.a * omega_v + par.b == pytest.approx(0.0, abs=1e-12)

    def test_stays_below_mechanical_curve(self):
        omega_e = 0.72
        omega_v = 0.5 * (omega_e + PARAMS.omega_mppt)
        par = build_recovery_parabola(omega_e, recovery_law(omega_e, PARAMS), omega_v, PARAMS)
        for omega in np.linspace(omega_e, omega_v, 50):
            assert par(omega) < p_mech(omega, PARAMS)


class TestControllerStep:
    def test_normal_stays_normal(self):
        state = initial_wind_state(PARAMS)
        p_cmd, nxt = controller_step(state, 0.0, PARAMS)
        assert nxt.mode is Mode.NORMAL
        assert p_cmd == pytest.approx(PARAMS.p0, abs=1e-12)

    def test_overproduction_entry_and_boost(self):
        state = initial_wind_state(PARAMS)
        p_cmd, nxt = controller_step(state, -0.3, PARAMS)
        assert nxt.mode is Mode.OVERPRODUCTION
        expected = p_mech(state.omega, PARAMS) + PARAMS.k_op * 0.3
        assert p_cmd == pytest.approx(expected, rel=1e-12)
        assert p_cmd == pytest.approx(p_mech(state.omega, PARAMS) + 0.045, rel=1e-9)

    def test_over_frequency_does_not_activate(self):
        state = initial_wind_state(PARAMS)
        _, nxt = controller_step(state, +0.3, PARAMS)
        assert nxt.mode is Mode.NORMAL

    def test_recovery_entry_at_minimum_speed(self):
        state = WindState(
            omega=PARAMS.omega_min, pi_state=0.0,
            i_inj=0.6, p_meas=0.6, mode=Mode.OVERPRODUCTION,
        )
        p_cmd, nxt = controller_step(state, -0.3, PARAMS)
        assert nxt.mode is Mode.RECOVERY
        assert nxt.omega_v == pytest.approx(0.5 * (PARAMS.omega_min + PARAMS.omega_mppt))
        # command continues from the freshly built parabola at the entry speed
        assert p_cmd == pytest.approx(nxt.parabola(PARAMS.omega_min), rel=1e-12)
        assert p_cmd < p_mech(PARAMS.omega_min, PARAMS)

    def test_overproduction_holds_below_threshold(self):
        # hysteresis: dropping |delta_f| below the threshold alone does not exit
        state = WindState(omega=0.80, pi_state=0.0, i_inj=0.62, p_meas=0.62,
                          mode=Mode.OVERPRODUCTION)
        _, nxt = controller_step(state, -0.05, PARAMS)
        assert nxt.mode is Mode.OVERPRODUCTION

    def test_overproduction_exits_when_command_sags(self):
        # deep in the event the boost no longer clears the pre-event power
        state = WindState(omega=0.74, pi_state=0.0, i_inj=0.55, p_meas=0.55,
                          mode=Mode.OVERPRODUCTION)
        p_op = command_power(state, -0.01 * 50.0 / 50.0, PARAMS)
        assert p_mech(0.74, PARAMS) + PARAMS.k_op * 0.01 < PARAMS.p0
        _, nxt = controller_step(state, -0.01, PARAMS)
        assert nxt.mode is Mode.RECOVERY

    def test_recovery_hands_back_near_tracking_point(self):
        omega_e = 0.76
        omega_v = 0.5 * (omega_e + PARAMS.omega_mppt)
        par = build_recovery_parabola(omega_e, recovery_law(omega_e, PARAMS), omega_v, PARAMS)
        state = WindState(omega=PARAMS.omega_mppt - 1e-4, pi_state=0.3,
                          i_inj=0.55, p_meas=0.55, mode=Mode.RECOVERY,
                          omega_v=omega_v, parabola=par)
        p_cmd, nxt = controller_step(state, -0.05, PARAMS)
        assert nxt.mode is Mode.NORMAL
        assert nxt.pi_state == 0.0  # integrator reset on hand-back


class TestDerivatives:
    def test_equilibrium_is_exact(self):
        state = initial_wind_state(PARAMS)
        p_cmd = command_power(state, 0.0, PARAMS)
        d, p_e = wind_derivatives(state, p_cmd, PARAMS)
        assert d == (0.0, 0.0, 0.0, 0.0)
        assert p_e == pytest.approx(PARAMS.p0, rel=1e-15)

    def test_swing_formula(self):
        # electric power 0.05 pu above mechanical at unit speed
        state = WindState(omega=1.0, pi_state=0.0,
                          i_inj=p_mech(1.0, PARAMS) + 0.05, p_meas=0.5)
        d, _ = wind_derivatives(state, 0.5, PARAMS)
        assert d[0] == pytest.approx(-0.05 / (2.0 * PARAMS.h_wt), rel=1e-12)

    def test_pi_frozen_outside_normal(self):
        state = WindState(omega=0.8, pi_state=0.1, i_inj=0.6, p_meas=0.55,
                          mode=Mode.OVERPRODUCTION)
        d, _ = wind_derivatives(state, 0.6, PARAMS)
        assert d[1] == 0.0

    def test_rotor_stall_aborts(self):
        state = WindState(omega=0.0, pi_state=0.0, i_inj=0.5, p_meas=0.5)
        with pytest.raises(SimulationDiverged):
            wind_derivatives(state, 0.5, PARAMS)


class TestSimulatedBehaviour:
    def test_mode_cycle_only(self, traces):
        allowed = {(0, 1), (1, 2), (2, 0)}
        for key, trace in traces.items():
            m = trace.mode
            steps = np.nonzero(np.diff(m) != 0)[0]
            for i in steps:
                assert (int(m[i]), int(m[i + 1])) in allowed, f"{key}: {m[i]}->{m[i+1]}"

    def test_full_cycle_happens_with_control(self, traces):
        m = traces[(4, True)].mode
        assert set(np.unique(m)) == {0, 1, 2}

    def test_omega_floor(self, traces):
        for control in (False, True):
            for n in (2, 3, 4):
                trace = traces[(n, control)]
                assert np.min(trace.omega_wt_pu) >= PARAMS.omega_min

    def test_omega_monotone_during_overproduction(self, traces):
        trace = traces[(4, True)]
        op = trace.mode == MODE_CODES[Mode.OVERPRODUCTION]
        omega = trace.omega_wt_pu[op]
        # skip the converter-lag settling at activation, then strictly decreasing
        assert np.all(np.diff(omega[10:]) < 0.0)

    def test_omega_nondecreasing_during_recovery(self, traces):
        trace = traces[(4, True)]
        rec = trace.mode == MODE_CODES[Mode.RECOVERY]
        omega = trace.omega_wt_pu[rec]
        assert np.all(np.diff(omega[10:]) >= 0.0)

    def test_disabled_controller_stays_at_tracking_point(self, traces):
        # grid frequency swings but the converter-decoupled turbine never moves
        trace = traces[(4, False)]
        assert np.max(np.abs(trace.p_wind_pu)) < 1e-3 * PARAMS.p0
        assert np.max(np.abs(trace.omega_wt_pu - PARAMS.omega_mppt)) < 1e-3 * PARAMS.omega_mppt

    def test_energy_bookkeeping_over_overproduction(self, traces):
        # kinetic drain balance: integral of (P_e - P_mt) equals h_wt*(w_start^2 - w_end^2)
        trace = traces[(4, True)]
        share = trace.config.shares.wind
        op = np.nonzero(trace.mode == MODE_CODES[Mode.OVERPRODUCTION])[0]
        i0, i1 = op[0], op[-1]
        p_e = PARAMS.p0 + trace.p_wind_pu[i0 : i1 + 1] / share
        p_mt = np.array([p_mech(w, PARAMS) for w in trace.omega_wt_pu[i0 : i1 + 1]])
        drained = np.trapezoid(p_e - p_mt, dx=trace.dt)
        stored = PARAMS.h_wt * (trace.omega_wt_pu[i0] ** 2 - trace.omega_wt_pu[i1] ** 2)
        assert drained == pytest.approx(stored, rel=5e-3)
