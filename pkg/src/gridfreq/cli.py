"""Command-line front end: simulate, estimate, sweep.

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 acceptance-check failure
(sweep --check only).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .core import PerUnitSystem, TimeSeries
from .errors import TraceFormatError, UndefinedEstimate, RankDeficientFit, SimulationDiverged
from .estimators import (
    METHODS,
    DisturbanceInfo,
    estimate_chassin,
    estimate_inoue,
    estimate_tuttelberg,
    estimate_wall,
    estimate_zografos17,
    estimate_zografos_r,
    fit_virtual_inertia_relation,
    identify_reduced_model,
)
from .io import REPORT_SCHEMA_VERSION, TraceFrame, read_trace, write_json, write_trace
from .plants import HydroParams, LoadParams, ThermalParams
from .sim import (
    SCENARIO_SHARES,
    GenerationShares,
    NoiseSpec,
    ScenarioConfig,
    SimulationTrace,
    rocof_metric,
    scenario_preset,
    simulate,
)
from .wind import WindParams

# Expected values used by `sweep --check`: scenario ground truths and the published
# ROCOF table (mHz/s), no-control row then with-control row.
EXPECTED_H_ROTATIONAL = {1: 4.80, 2: 4.05, 3: 3.30, 4: 2.55}
EXPECTED_ROCOF = {
    False: {1: -256.06, 2: -301.08, 3: -369.20, 4: -474.70},
    True: {1: -256.06, 2: -298.45, 3: -364.90, 4: -410.10},
}
EXPECTED_SLOPE = 0.0357
ROCOF_TOL = 0.10
ROCOF_TOL_NO_CONTROL = 0.05
SLOPE_TOL = 0.15


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    """Round-trip decimal formatting for CSV cells (plain float, 17 significant digits)."""
    return format(float(x), ".17g")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's default 2
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class EstimatorOptions:
    """Knobs shared by `estimate` and `sweep`."""

    fit_window_s: float = 15.0
    denoise_width_s: float = 0.25
    rocof_window_s: float = 0.5
    wall_a: int = 5
    wall_w: int = 2
    wall_dt: float = 0.2
    # Deeper Wall reporting interval used to read the frequency-support (virtual)
    # component: the longer window span averages the developed wind response in.
    wall_support_dt: float = 0.3
    order: int = 3
    tutt_dt: float = 0.05
    tutt_window_s: float = 20.0
    zr_n: int = 10
    zr_spacing_s: float = 0.01


def run_estimators(
    frame: TraceFrame | SimulationTrace,
    dist: DisturbanceInfo,
    f0_hz: float,
    methods: tuple[str, ...] = METHODS,
    opts: EstimatorOptions = EstimatorOptions(),
) -> dict:
    """Run the selected methods against one trace; failures become error entries."""
    f_pu = TimeSeries(frame.t0, frame.dt, frame.delta_f_pu)
    results: dict[str, dict] = {}
    wall_series = None
    for method in methods:
        try:
            if method == "inoue":
                est = estimate_inoue(f_pu, dist, fit_window_s=opts.fit_window_s)
            elif method == "chassin":
                est = estimate_chassin(
                    f_pu, dist,
                    denoise_width_s=opts.denoise_width_s,
                    search_window_s=opts.rocof_window_s,
                )
            elif method == "zografos17":
                est = estimate_zografos17(
                    f_pu, dist,
                    denoise_width_s=opts.denoise_width_s,
                    search_window_s=opts.rocof_window_s,
                )
            elif method == "wall":
                p_total = TimeSeries(frame.t0, frame.dt, frame.p_load_pu)
                rocof_pu = TimeSeries(frame.t0, frame.dt, frame.rocof_hz_s / f0_hz)
                wall_series, est = estimate_wall(
                    p_total, rocof_pu, a=opts.wall_a, w=opts.wall_w, sample_dt=opts.wall_dt
                )
            elif method == "tuttelberg":
                t_lo = max(frame.t0, dist.t_dist - 2.0)
                t_hi = min(frame.t0 + frame.dt * (len(frame) - 1),
                           dist.t_dist + opts.tutt_window_s)
                u = np.where(
                    frame.t0 + frame.dt * np.arange(len(frame)) >= dist.t_dist,
                    dist.dp_dist, 0.0,
                )
                dp_series = TimeSeries(frame.t0, frame.dt, u).slice_time(t_lo, t_hi)
                df_series = f_pu.slice_time(t_lo, t_hi)
                model = identify_reduced_model(
                    dp_series, df_series, order=opts.order, sample_dt=opts.tutt_dt
                )
                est = estimate_tuttelberg(model)
            elif method == "zografos_r":
                est = estimate_zografos_r(
                    f_pu, dist, n_points=opts.zr_n, spacing_s=opts.zr_spacing_s
                )
            else:
                raise UsageError(f"unknown method {method!r}")
            results[method] = {"h_s": est.h_est, "diagnostics": est.diagnostics}
        except (UndefinedEstimate, RankDeficientFit, ValueError) as exc:
            results[method] = {"error": f"{type(exc).__name__}: {exc}"}
    if wall_series is not None:
        results["wall"]["h_of_t"] = {
            "t0": wall_series.t0,
            "dt": wall_series.dt,
            "n": len(wall_series),
        }
    return results


# ---------------------------------------------------------------------------
# configuration assembly
# ---------------------------------------------------------------------------

def _config_from_file(path: str) -> dict:
    try:
        payload = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(payload, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return payload


def _build_config(args) -> ScenarioConfig:
    file_cfg = _config_from_file(args.config) if args.config else {}
    scenario = args.scenario if args.scenario is not None else file_cfg.get("scenario", 1)
    if scenario not in SCENARIO_SHARES:
        raise UsageError(f"scenario must be one of 1..4, got {scenario}")
    cfg = scenario_preset(scenario, wind_control=False)

    def section(name, cls, default):
        data = file_cfg.get(name)
        if data is None:
            return default
        if not isinstance(data, dict):
            raise UsageError(f"config section {name!r} must be an object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"config section {name!r}: unknown keys {sorted(unknown)}")
        return cls(**{**dataclasses.asdict(default), **data})

    shares = file_cfg.get("shares")
    if shares is not None:
        cfg = replace(cfg, shares=GenerationShares(**shares))
    cfg = replace(
        cfg,
        thermal=section("thermal", ThermalParams, cfg.thermal),
        hydro=section("hydro", HydroParams, cfg.hydro),
        wind=section("wind", WindParams, cfg.wind),
        load=section("load", LoadParams, cfg.load),
        pu=section("pu", PerUnitSystem, cfg.pu),
    )
    if "wind_control" in file_cfg:
        cfg = replace(cfg, wind_control=bool(file_cfg["wind_control"]))
    if "dt" in file_cfg:
        cfg = replace(cfg, dt=float(file_cfg["dt"]))
    if "duration" in file_cfg:
        cfg = replace(cfg, duration=float(file_cfg["duration"]))
    if "noise" in file_cfg and file_cfg["noise"] is not None:
        cfg = replace(cfg, noise=NoiseSpec(**file_cfg["noise"]))

    # flags override file values
    if args.wind_control is not None:
        cfg = replace(cfg, wind_control=args.wind_control == "on")
    if args.dt is not None:
        cfg = replace(cfg, dt=args.dt)
    if args.duration is not None:
        cfg = replace(cfg, duration=args.duration)
    if args.f0 is not None:
        cfg = replace(cfg, pu=replace(cfg.pu, f0_hz=args.f0))
    wind = cfg.wind
    if args.k_op is not None:
        wind = replace(wind, k_op=args.k_op)
    if args.delta_f_lim is not None:
        wind = replace(wind, delta_f_lim=args.delta_f_lim)
    if args.h_wt is not None:
        wind = replace(wind, h_wt=args.h_wt)
    if wind is not cfg.wind:
        cfg = replace(cfg, wind=wind)
    if args.noise_sigma is not None and args.noise_sigma > 0.0:
        cfg = replace(cfg, noise=NoiseSpec(sigma_hz=args.noise_sigma, seed=args.seed))
    elif cfg.noise is not None and args.seed is not None:
        cfg = replace(cfg, noise=replace(cfg.noise, seed=args.seed))
    return cfg


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _trace_summary(trace: SimulationTrace, window_s: float) -> dict:
    return {
        "nadir_hz": trace.nadir_hz(),
        "rocof_mhz_s": rocof_metric(trace, window_s),
        "final_delta_f_mhz": float(trace.delta_f_pu[-1] * trace.f0_hz * 1000.0),
    }


def cmd_simulate(args) -> int:
    cfg = _build_config(args)
    trace = simulate(cfg)
    out = Path(args.out)
    if args.format == "csv":
        write_trace(trace, out)
    else:
        payload = {
            "t0": trace.t0,
            "dt": trace.dt,
            "f0_hz": trace.f0_hz,
            "columns": {
                "f_hz": trace.f_hz.tolist(),
                "delta_f_pu": trace.delta_f_pu.tolist(),
                "rocof_hz_s": trace.rocof_hz_s.tolist(),
                "p_thermal_pu": trace.p_thermal_pu.tolist(),
                "p_hydro_pu": trace.p_hydro_pu.tolist(),
                "p_wind_pu": trace.p_wind_pu.tolist(),
                "p_load_pu": trace.p_load_pu.tolist(),
                "omega_wt_pu": trace.omega_wt_pu.tolist(),
                "mode": trace.mode_names(),
            },
        }
        write_json(payload, out)
    s = _trace_summary(trace, args.rocof_window)
    print(f"wrote {out} ({len(trace)} samples, dt={trace.dt} s)")
    print(
        f"H_rot={trace.h_rotational_s:.4f} s  nadir={s['nadir_hz']:.4f} Hz  "
        f"rocof={s['rocof_mhz_s']:.2f} mHz/s  |df(end)|={abs(s['final_delta_f_mhz']):.2f} mHz"
    )
    return 0


def _estimator_options(args) -> EstimatorOptions:
    base = EstimatorOptions()
    return EstimatorOptions(
        fit_window_s=args.fit_window if args.fit_window is not None else base.fit_window_s,
        denoise_width_s=(
            args.denoise_width if args.denoise_width is not None else base.denoise_width_s
        ),
        rocof_window_s=args.rocof_window,
        wall_a=args.wall_a if args.wall_a is not None else base.wall_a,
        wall_w=args.wall_w if args.wall_w is not None else base.wall_w,
        wall_dt=args.wall_dt if args.wall_dt is not None else base.wall_dt,
        wall_support_dt=(
            args.wall_support_dt if args.wall_support_dt is not None else base.wall_support_dt
        ),
        order=args.order if args.order is not None else base.order,
        zr_n=args.n_points if args.n_points is not None else base.zr_n,
    )


def cmd_estimate(args) -> int:
    frame = read_trace(args.trace)
    f0 = args.f0 if args.f0 is not None else frame.f0_hz()
    dist = DisturbanceInfo.from_load_step(args.dp_dist, args.t_dist)
    if args.method == "all":
        methods = METHODS
    else:
        methods = (args.method.replace("-", "_"),)
        if methods[0] not in METHODS:
            raise UsageError(f"unknown method {args.method!r}")
    results = run_estimators(frame, dist, f0, methods, _estimator_options(args))
    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "estimate",
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "trace": str(args.trace),
        "dp_dist_pu": dist.dp_dist,
        "t_dist_s": dist.t_dist,
        "f0_hz": f0,
        "estimates": results,
    }
    write_json(payload, args.out)
    for name, entry in results.items():
        if "h_s" in entry:
            print(f"{name:12s} H = {entry['h_s']:.4f} s")
        else:
            print(f"{name:12s} failed: {entry['error']}")
    print(f"wrote {args.out}")
    return 0


def _sweep_scenarios(arg: str) -> list[int]:
    try:
        ids = sorted({int(tok) for tok in arg.split(",") if tok.strip()})
    except ValueError:
        raise UsageError(f"--scenarios must be a comma list of integers, got {arg!r}")
    bad = [i for i in ids if i not in SCENARIO_SHARES]
    if bad or not ids:
        raise UsageError(f"--scenarios entries must be in 1..4, got {arg!r}")
    return ids


def cmd_sweep(args) -> int:
    scenario_ids = _sweep_scenarios(args.scenarios)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    opts = _estimator_options(args)

    runs = []
    wall_panel_rows = []
    rocof_rows = []
    for n in scenario_ids:
        for control in (False, True):
            cfg = scenario_preset(n, wind_control=control)
            if args.dt is not None:
                cfg = replace(cfg, dt=args.dt)
            if args.duration is not None:
                cfg = replace(cfg, duration=args.duration)
            wind = cfg.wind
            if args.k_op is not None:
                wind = replace(wind, k_op=args.k_op)
            if args.delta_f_lim is not None:
                wind = replace(wind, delta_f_lim=args.delta_f_lim)
            if wind is not cfg.wind:
                cfg = replace(cfg, wind=wind)
            trace = simulate(cfg)
            dist = DisturbanceInfo.from_load_step(cfg.load.delta_p_l, cfg.load.t_dist)
            estimates = run_estimators(trace, dist, trace.f0_hz, METHODS, opts)
            h_rot = trace.h_rotational_s
            for entry in estimates.values():
                if "h_s" in entry:
                    entry["deviation_pct"] = 100.0 * (entry["h_s"] - h_rot) / h_rot
            runs.append(
                {
                    "scenario": n,
                    "wind_control": control,
                    "wpi_pct": 100.0 * cfg.shares.wind,
                    "h_rotational_s": h_rot,
                    **_trace_summary(trace, args.rocof_window),
                    "estimates": estimates,
                    "wall_support_h_s": _wall_support(trace, opts),
                }
            )
            t = trace.times()
            sel = (t >= cfg.load.t_dist - 1.0) & (t <= cfg.load.t_dist + 15.0)
            for ti, ri in zip(t[sel], trace.rocof_hz_s[sel]):
                rocof_rows.append((n, control, float(ti), float(ri * 1000.0)))
            if n == 4:
                wall_panel_rows.extend(
                    _wall_panel_rows(trace, dist, opts, control)
                )

    regression = None
    notice = None
    points = []
    for n in scenario_ids:
        on = next((r for r in runs if r["scenario"] == n and r["wind_control"]), None)
        off = next((r for r in runs if r["scenario"] == n and not r["wind_control"]), None)
        if on is None or off is None or n == 1:
            continue
        h_on = on["wall_support_h_s"]
        h_off = off["wall_support_h_s"]
        if h_on is None or h_off is None:
            continue
        points.append({"wpi_pct": on["wpi_pct"], "h_v_eq_s": h_on - h_off,
                       "h_wall_on_s": h_on, "h_wall_off_s": h_off})
    if len(points) >= 2:
        fit = fit_virtual_inertia_relation([(p["wpi_pct"], p["h_v_eq_s"]) for p in points])
        regression = {
            "points": points,
            "slope_s_per_pct": fit.slope_s_per_pct,
            "r_squared": fit.r_squared,
            "h_v_wt_s": fit.slope_s_per_pct * 100.0,
            "slope_text": f"{fit.slope_s_per_pct:.4f}",
            "r_squared_text": f"{fit.r_squared:.3f}",
        }
    else:
        notice = (
            "regression skipped: needs wall estimates for at least two wind scenarios "
            f"(got {len(points)})"
        )

    checks = _run_checks(runs, regression) if args.check else None

    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "sweep",
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "run": {
            "dt": args.dt if args.dt is not None else 0.01,
            "duration": args.duration if args.duration is not None else 150.0,
            "seed": args.seed,
            "rocof_window_s": args.rocof_window,
            "scenarios": scenario_ids,
            "version": __version__,
        },
        "scenarios": runs,
        "regression": regression,
        "regression_notice": notice,
        "checks": checks,
    }
    write_json(payload, out_dir / "report.json")
    _write_sweep_csv(runs, out_dir / "sweep.csv")
    _write_rocof_csv(rocof_rows, out_dir / "rocof_traces.csv")
    _write_wall_panels_csv(wall_panel_rows, out_dir / "wall_panels.csv")
    _write_regression_csv(regression, out_dir / "regression.csv")

    for r in runs:
        flag = "on " if r["wind_control"] else "off"
        print(
            f"scenario {r['scenario']} control={flag} H_rot={r['h_rotational_s']:.2f} s "
            f"rocof={r['rocof_mhz_s']:.2f} mHz/s nadir={r['nadir_hz']:.3f} Hz"
        )
    if regression:
        print(
            f"regression: H_V,eq = {regression['slope_text']} * WPI  "
            f"(R^2 = {regression['r_squared_text']}, H_V,WT = {regression['h_v_wt_s']:.3f} s)"
        )
    elif notice:
        print(notice)
    print(f"wrote {out_dir}/report.json and plot-data CSVs")
    if checks is not None:
        failed = [c for c in checks if not c["passed"]]
        for c in checks:
            mark = "ok " if c["passed"] else "FAIL"
            print(f"[{mark}] {c['name']}: {c['detail']}")
        if failed:
            return 3
    return 0


def _wall_support(trace, opts):
    """Wall estimate at the deeper support-capture reporting interval."""
    p_total = TimeSeries(trace.t0, trace.dt, trace.p_load_pu)
    rocof_pu = TimeSeries(trace.t0, trace.dt, trace.rocof_hz_s / trace.f0_hz)
    try:
        _, est = estimate_wall(
            p_total, rocof_pu, a=opts.wall_a, w=opts.wall_w, sample_dt=opts.wall_support_dt
        )
    except (UndefinedEstimate, ValueError):
        return None
    return est.h_est


def _wall_panel_rows(trace, dist, opts, control):
    p_total = TimeSeries(trace.t0, trace.dt, trace.p_load_pu)
    rocof_pu = TimeSeries(trace.t0, trace.dt, trace.rocof_hz_s / trace.f0_hz)
    try:
        h_series, _ = estimate_wall(
            p_total, rocof_pu, a=opts.wall_a, w=opts.wall_w, sample_dt=opts.wall_dt
        )
    except UndefinedEstimate:
        return []
    rows = []
    t = h_series.times()
    sel = (t >= dist.t_dist - 5.0) & (t <= dist.t_dist + 15.0)
    stride = max(1, int(round(h_series.dt / trace.dt)))
    for i in np.nonzero(sel)[0]:
        k = i * stride
        rows.append(
            (
                control,
                float(t[i]),
                float(h_series.values[i]),
                float(trace.p_load_pu[k]),
                float(trace.rocof_hz_s[k] * 1000.0),
            )
        )
    return rows


def _write_sweep_csv(runs, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ("scenario", "wind_control", "wpi_pct", "h_rotational_s", "rocof_mhz_s",
             "nadir_hz", "method", "h_est_s", "deviation_pct")
        )
        for r in runs:
            for method in METHODS:
                entry = r["estimates"][method]
                writer.writerow(
                    (
                        r["scenario"],
                        "on" if r["wind_control"] else "off",
                        r["wpi_pct"],
                        _fmt(r["h_rotational_s"]),
                        _fmt(r["rocof_mhz_s"]),
                        _fmt(r["nadir_hz"]),
                        method,
                        _fmt(entry["h_s"]) if "h_s" in entry else "",
                        _fmt(entry["deviation_pct"]) if "deviation_pct" in entry else "",
                    )
                )


def _write_rocof_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("scenario", "wind_control", "t_s", "rocof_mhz_s"))
        for n, control, t, r in rows:
            writer.writerow((n, "on" if control else "off", _fmt(t), _fmt(r)))


def _write_wall_panels_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("wind_control", "t_s", "h_wall_s", "p_total_pu", "rocof_mhz_s"))
        for control, t, h, p, r in rows:
            writer.writerow(("on" if control else "off", _fmt(t), _fmt(h), _fmt(p), _fmt(r)))


def _write_regression_csv(regression, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ("wpi_pct", "h_v_eq_s", "h_wall_on_s", "h_wall_off_s",
             "slope_s_per_pct", "r_squared", "slope_text", "r_squared_text")
        )
        if regression is None:
            return
        for p in regression["points"]:
            writer.writerow(
                (
                    _fmt(p["wpi_pct"]),
                    _fmt(p["h_v_eq_s"]),
                    _fmt(p["h_wall_on_s"]),
                    _fmt(p["h_wall_off_s"]),
                    _fmt(regression["slope_s_per_pct"]),
                    _fmt(regression["r_squared"]),
                    regression["slope_text"],
                    regression["r_squared_text"],
                )
            )


def _run_checks(runs, regression):
    checks = []

    def add(name, passed, detail):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    for r in runs:
        n = r["scenario"]
        expected_h = EXPECTED_H_ROTATIONAL[n]
        add(
            f"h_rotational scenario {n}",
            abs(r["h_rotational_s"] - expected_h) < 1.0e-9,
            f"got {r['h_rotational_s']!r}, expected {expected_h}",
        )
        expected_r = EXPECTED_ROCOF[r["wind_control"]][n]
        tol = ROCOF_TOL if r["wind_control"] else ROCOF_TOL_NO_CONTROL
        rel = abs(r["rocof_mhz_s"] - expected_r) / abs(expected_r)
        add(
            f"rocof scenario {n} control={'on' if r['wind_control'] else 'off'}",
            rel <= tol,
            f"got {r['rocof_mhz_s']:.2f} mHz/s, expected {expected_r} (+/-{tol:.0%})",
        )
    if regression is not None:
        rel = abs(regression["slope_s_per_pct"] - EXPECTED_SLOPE) / EXPECTED_SLOPE
        add(
            "virtual inertia slope",
            rel <= SLOPE_TOL,
            f"got {regression['slope_s_per_pct']:.4f}, expected {EXPECTED_SLOPE} (+/-{SLOPE_TOL:.0%})",
        )
        add(
            "virtual inertia linearity",
            regression["r_squared"] >= 0.98,
            f"R^2 = {regression['r_squared']:.4f}",
        )
    return checks


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common_sim_flags(p):
    p.add_argument("--dt", type=float, default=None, help="integration step, s")
    p.add_argument("--duration", type=float, default=None, help="simulated horizon, s")
    p.add_argument("--f0", type=float, default=None, help="nominal frequency, Hz")
    p.add_argument("--k-op", type=float, default=None, help="overproduction gain, pu/Hz")
    p.add_argument("--delta-f-lim", type=float, default=None,
                   help="wind controller activation threshold, Hz")
    p.add_argument("--seed", type=int, default=0, help="noise seed")


def _add_estimator_flags(p):
    p.add_argument("--fit-window", type=float, default=None,
                   help="polynomial-fit window after the event, s (15..20)")
    p.add_argument("--denoise-width", type=float, default=None,
                   help="moving-average width for derivative methods, s")
    p.add_argument("--wall-a", type=int, default=None, help="window width, samples")
    p.add_argument("--wall-w", type=int, default=None, help="window separation, samples")
    p.add_argument("--wall-dt", type=float, default=None,
                   help="reporting interval the window filters run at, s")
    p.add_argument("--wall-support-dt", type=float, default=None,
                   help="deeper reporting interval used for the virtual-inertia readout, s")
    p.add_argument("--order", type=int, default=None, help="reduced model order")
    p.add_argument("--n-points", type=int, default=None,
                   help="points around the ROCOF extremum (even)")


def build_parser() -> _Parser:
    parser = _Parser(prog="gridfreq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scenario and write the trace")
    p_sim.add_argument("--scenario", type=int, choices=sorted(SCENARIO_SHARES), default=None)
    p_sim.add_argument("--wind-control", choices=("on", "off"), default=None)
    p_sim.add_argument("--config", default=None, help="JSON config file (flags override)")
    p_sim.add_argument("--out", default="trace.csv")
    p_sim.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sim.add_argument("--noise-sigma", type=float, default=None,
                       help="frequency measurement noise, Hz")
    p_sim.add_argument("--h-wt", type=float, default=None, help="wind rotor inertia, s")
    p_sim.add_argument("--rocof-window", type=float, default=0.5)
    _add_common_sim_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_est = sub.add_parser("estimate", help="run estimators against a trace file")
    p_est.add_argument("--trace", required=True, help="input trace CSV")
    p_est.add_argument(
        "--method",
        default="all",
        choices=("all", "inoue", "chassin", "wall", "zografos17", "tuttelberg", "zografos-r"),
    )
    p_est.add_argument("--dp-dist", type=float, default=0.05,
                       help="load step magnitude, pu (positive = load increase)")
    p_est.add_argument("--t-dist", type=float, default=50.0, help="disturbance time, s")
    p_est.add_argument("--f0", type=float, default=None,
                       help="nominal frequency, Hz (default: inferred from the trace)")
    p_est.add_argument("--out", default="estimates.json")
    p_est.add_argument("--rocof-window", type=float, default=0.5)
    _add_estimator_flags(p_est)
    p_est.set_defaults(func=cmd_estimate)

    p_sweep = sub.add_parser("sweep", help="all scenarios x control flags, all methods")
    p_sweep.add_argument("--out-dir", default="sweep")
    p_sweep.add_argument("--scenarios", default="1,2,3,4", help="comma list, e.g. 1,3")
    p_sweep.add_argument("--check", action="store_true",
                         help="compare against the published expectations; exit 3 on failure")
    p_sweep.add_argument("--rocof-window", type=float, default=0.5)
    _add_common_sim_flags(p_sweep)
    _add_estimator_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (TraceFormatError, SimulationDiverged, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
