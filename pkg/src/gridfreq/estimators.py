"""Inertia estimation from frequency excursions: six methodologies.

All estimators consume per-unit frequency deviation (delta_f / f0); Hz inputs must be
normalized at the boundary.  `DisturbanceInfo.dp_dist` is the *signed* imbalance
dP_mech - dP_load: a load increase of 0.05 pu is dp_dist = -0.05.  Every swing
inversion is then H = dp_dist / (2 * d(delta_f_pu)/dt), which is positive for a load
step with falling frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import TimeSeries, derivative, moving_average
from .errors import RankDeficientFit, UndefinedEstimate

__all__ = [
    "DisturbanceInfo",
    "InertiaEstimate",
    "ReducedOrderModel",
    "RegressionResult",
    "estimate_inoue",
    "estimate_chassin",
    "estimate_wall",
    "estimate_zografos17",
    "estimate_zografos_r",
    "estimate_tuttelberg",
    "identify_reduced_model",
    "fit_virtual_inertia_relation",
    "METHODS",
]

METHODS = ("inoue", "chassin", "wall", "zografos17", "tuttelberg", "zografos_r")

_ROCOF_FLOOR = 1.0e-9  # below this the swing inversion is undefined


@dataclass(frozen=True)
class DisturbanceInfo:
    """Known imbalance: signed dp (pu, negative for a load increase) and its time."""

    dp_dist: float
    t_dist: float

    def __post_init__(self):
        if self.dp_dist == 0.0:
            raise ValueError("dp_dist must be nonzero")

    @classmethod
    def from_load_step(cls, delta_p_l: float, t_dist: float) -> "DisturbanceInfo":
        """Build from a load-step magnitude (positive = load increase)."""
        return cls(dp_dist=-delta_p_l, t_dist=t_dist)


@dataclass(frozen=True)
class InertiaEstimate:
    method: str
    h_est: float
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RegressionResult:
    slope_s_per_pct: float
    r_squared: float


@dataclass(frozen=True)
class ReducedOrderModel:
    """Continuous rational model num(s)/den(s), highest-order coefficients first."""

    num: np.ndarray
    den: np.ndarray
    order: int
    fit_residual: float
    sample_dt: float

    def impulse_at_zero(self) -> float:
        """h(0+) of the strictly proper part: the coefficient ratio b_{n-1}/a_n."""
        den = np.asarray(self.den, dtype=float)
        num = np.zeros_like(den)
        raw = np.asarray(self.num, dtype=float)
        num[len(den) - len(raw):] = raw
        if abs(den[0]) < 1.0e-300:
            raise UndefinedEstimate("degenerate denominator")
        direct = num[0] / den[0]
        strict = num - direct * den
        return float(strict[1] / den[0])


# ---------------------------------------------------------------------------
# Inoue: 5th-degree polynomial fit of delta_f/f0 after the imbalance
# ---------------------------------------------------------------------------

def estimate_inoue(
    f_pu: TimeSeries,
    dist: DisturbanceInfo,
    fit_window_s: float = 15.0,
    weight_decay_s: float = 0.15,
) -> InertiaEstimate:
    """Fit A5*t^5 + ... + A1*t (no constant term, t from t_dist); H = dp / (2*A1).

    A1 stands in for the ROCOF at t_dist+, so the least squares is exponentially
    weighted (decay weight_decay_s, weights below 1e-4 dropped) to anchor the fitted
    slope where the inertial response dominates; an unweighted fit over the full
    window lets the nadir and recovery drag A1 off by ~20%.
    """
    if not 15.0 <= fit_window_s <= 20.0:
        raise ValueError(f"fit_window_s must be in [15, 20], got {fit_window_s}")
    if weight_decay_s <= 0.0:
        raise ValueError(f"weight_decay_s must be > 0, got {weight_decay_s}")
    seg = f_pu.slice_time(dist.t_dist, dist.t_dist + fit_window_s)
    if len(seg) < 50:
        raise ValueError(f"fit window too short: {len(seg)} samples (< 50)")
    tau = seg.times() - dist.t_dist
    # Scale time to [0, 1] for conditioning; A1 unscales by 1/window.
    basis = np.column_stack([(tau / fit_window_s) ** k for k in range(1, 6)])
    weights = np.exp(-tau / weight_decay_s)
    weights[weights < 1.0e-4] = 0.0
    sw = np.sqrt(weights)
    y = seg.values - seg.values[0]
    coef, _, rank, _ = np.linalg.lstsq(basis * sw[:, None], y * sw, rcond=None)
    if rank < 5:
        raise RankDeficientFit(f"polynomial fit rank {rank} < 5")
    a1 = float(coef[0] / fit_window_s)
    if abs(a1) < _ROCOF_FLOOR:
        raise UndefinedEstimate("fitted initial slope is zero")
    h = dist.dp_dist / (2.0 * a1)
    resid = y - basis @ coef
    rms = math.sqrt(float(np.sum(weights * resid**2) / np.sum(weights)))
    return InertiaEstimate(
        method="inoue",
        h_est=h,
        diagnostics={
            "a1_per_s": float(a1),
            "coefficients": [float(c / fit_window_s ** (k + 1)) for k, c in enumerate(coef)],
            "fit_window_s": fit_window_s,
            "weight_decay_s": weight_decay_s,
            "fit_rms": rms,
            "n_samples": len(seg),
        },
    )


# ---------------------------------------------------------------------------
# Chassin: denoise, differentiate, invert the swing at the post-event ROCOF
# ---------------------------------------------------------------------------

def _sampled_rocof(
    f_pu: TimeSeries, dist: DisturbanceInfo, denoise_width_s: float, search_window_s: float
) -> tuple[float, float]:
    """Denoised df/dt sampled at its largest-magnitude point after the disturbance.

    Returns (rocof_pu_per_s, sample_time).  Window-averaging instead would smear the
    pre-event flat segment into the reading; the extremum is the ROCOF right after
    the imbalance that the swing inversion wants.
    """
    smooth = moving_average(f_pu, denoise_width_s) if denoise_width_s > 0.0 else f_pu
    rocof = derivative(smooth)
    i0 = rocof.index_at(dist.t_dist)
    i1 = rocof.index_at(min(dist.t_dist + search_window_s,
                            rocof.t0 + rocof.dt * (len(rocof) - 1)))
    seg = rocof.values[i0 : i1 + 1]
    k = int(np.argmax(np.abs(seg)))
    return float(seg[k]), float(rocof.t0 + (i0 + k) * rocof.dt)


def estimate_chassin(
    f_pu: TimeSeries,
    dist: DisturbanceInfo,
    denoise_width_s: float = 0.25,
    search_window_s: float = 0.5,
) -> InertiaEstimate:
    """Moving-average denoise, central-difference derivative, H = dp / (2*df/dt)."""
    r, t_sample = _sampled_rocof(f_pu, dist, denoise_width_s, search_window_s)
    if abs(r) < _ROCOF_FLOOR:
        raise UndefinedEstimate("frequency derivative is zero after the disturbance")
    return InertiaEstimate(
        method="chassin",
        h_est=dist.dp_dist / (2.0 * r),
        diagnostics={
            "rocof_pu_s": r,
            "t_sample_s": t_sample,
            "denoise_width_s": denoise_width_s,
            "search_window_s": search_window_s,
        },
    )


def estimate_zografos17(
    f_pu: TimeSeries,
    dist: DisturbanceInfo,
    denoise_width_s: float = 0.25,
    search_window_s: float = 0.5,
) -> InertiaEstimate:
    """Voltage-dependent load variant in its degenerate form V_s(t) = 1, dP_L(t) = 0.

    With the load term gone the estimator collapses to the same swing inversion as
    Chassin and shares its ROCOF sampling, so the two agree on any trace.
    """
    r, t_sample = _sampled_rocof(f_pu, dist, denoise_width_s, search_window_s)
    if abs(r) < _ROCOF_FLOOR:
        raise UndefinedEstimate("frequency derivative is zero after the disturbance")
    return InertiaEstimate(
        method="zografos17",
        h_est=dist.dp_dist / (2.0 * r),
        diagnostics={
            "rocof_pu_s": r,
            "t_sample_s": t_sample,
            "denoise_width_s": denoise_width_s,
            "load_term_pu": 0.0,
            "voltage_profile": 1.0,
        },
    )


# ---------------------------------------------------------------------------
# Wall: four sliding window filters over total power and ROCOF
# ---------------------------------------------------------------------------

def estimate_wall(
    p_total: TimeSeries,
    rocof: TimeSeries,
    a: int = 5,
    w: int = 2,
    sample_dt: float = 0.2,
) -> tuple[TimeSeries, InertiaEstimate]:
    """H(t) = (P1 - P2) / (2 * (R2 - R1)) from two A-sample windows separated by W.

    At each evaluation instant the trailing window holds the most recent A samples and
    the leading window the A samples W earlier.  Inputs are first decimated to a
    PMU-like reporting interval `sample_dt` (the window geometry counts samples, per
    the reference's A=5 / W=2 picture).  The estimate is only meaningful while the
    window pair brackets the disturbance: the scalar reads H(t) where the power-step
    contrast |P1 - P2| peaks, and H(t) is NaN (flagged) wherever the ROCOF contrast is
    weak, which covers everything far from the disturbance.

    The window span sets the horizon over which frequency support is averaged into the
    estimate; longer sample_dt reads deeper into the event and picks up more of a wind
    plant's proportional support as apparent inertia.
    """
    if a < 2 or w < 1:
        raise ValueError(f"need a >= 2 and w >= 1, got a={a}, w={w}")
    if p_total.t0 != rocof.t0 or p_total.dt != rocof.dt or len(p_total) != len(rocof):
        raise ValueError("p_total and rocof series must be aligned")
    stride = max(1, int(round(sample_dt / p_total.dt)))
    p = p_total.decimate(stride)
    r = rocof.decimate(stride)
    span = 2 * a + w
    if len(p) < span:
        raise ValueError(f"series too short: {len(p)} samples < window span {span}")

    csum_p = np.concatenate(([0.0], np.cumsum(p.values)))
    csum_r = np.concatenate(([0.0], np.cumsum(r.values)))

    idx = np.arange(span - 1, len(p))
    hi2 = idx + 1
    lo2 = hi2 - a
    hi1 = lo2 - w
    lo1 = hi1 - a
    p2 = (csum_p[hi2] - csum_p[lo2]) / a
    p1 = (csum_p[hi1] - csum_p[lo1]) / a
    r2 = (csum_r[hi2] - csum_r[lo2]) / a
    r1 = (csum_r[hi1] - csum_r[lo1]) / a

    contrast = r2 - r1
    floor = max(_ROCOF_FLOOR, 0.05 * float(np.max(np.abs(contrast))))
    h = np.full(len(p), np.nan)
    valid = np.abs(contrast) >= floor
    h[idx[valid]] = 0.5 * (p1[valid] - p2[valid]) / contrast[valid]

    # The disturbance instant is where the window pair brackets the power step.
    best = int(np.argmax(np.abs(p1 - p2)))
    if abs(contrast[best]) < _ROCOF_FLOOR:
        raise UndefinedEstimate("no ROCOF contrast: power and ROCOF are constant")
    i_best = idx[best]
    h_series = TimeSeries(p.t0, p.dt, h, allow_gaps=True)
    est = InertiaEstimate(
        method="wall",
        h_est=float(0.5 * (p1[best] - p2[best]) / contrast[best]),
        diagnostics={
            "a": a,
            "w": w,
            "sample_dt_s": p.dt,
            "t_eval_s": float(p.t0 + i_best * p.dt),
            "rocof_contrast_pu_s": float(contrast[best]),
            "power_contrast_pu": float(p1[best] - p2[best]),
        },
    )
    return h_series, est


# ---------------------------------------------------------------------------
# Zografos 2018, R approach: unknown governor response around the ROCOF extremum
# ---------------------------------------------------------------------------

def _first_rocof_extremum(rocof: TimeSeries, t_dist: float) -> int:
    """Index of the first local extremum of |df/dt| after the disturbance.

    On a step-disturbance trace the ROCOF magnitude peaks right after the event and
    then relaxes as load damping and frequency support bite, so the first point where
    |df/dt| stops growing is the extremum the method wants: as early as possible,
    before the governor response dominates.
    """
    i = rocof.index_at(t_dist) + 1
    v = rocof.values
    if i >= len(v) - 1:
        raise UndefinedEstimate("trace ends at the disturbance")
    while i + 1 < len(v) and abs(v[i + 1]) > abs(v[i]):
        i += 1
    if i + 1 >= len(v):
        raise UndefinedEstimate("no local extremum of the ROCOF after the disturbance")
    return i


def estimate_zografos_r(
    f_pu: TimeSeries,
    dist: DisturbanceInfo,
    n_points: int = 10,
    spacing_s: float = 0.01,
    t_sr: Optional[float] = None,
    denoise_width_s: float = 0.0,
) -> InertiaEstimate:
    """Solve the (N+1)-equation linear system around the first ROCOF extremum t_sr.

    The mechanical response is written dp_mech(t) = -R(t)*delta_f(t) with R unknown;
    the swing equation at N points around t_sr plus the closure "R(t_sr) equals the
    neighbour average" pins both H and R(t_sr).  N must be even (N/2 points per side).
    When the extremum sits on the disturbance itself the neighbourhood is pushed just
    far enough forward that every sample is post-event (the pre-event half would make
    the equations inconsistent: zero ROCOF, zero deviation, nonzero imbalance).
    """
    if n_points < 2 or n_points % 2 != 0:
        raise ValueError(f"n_points must be a positive even integer, got {n_points}")
    smooth = moving_average(f_pu, denoise_width_s) if denoise_width_s > 0.0 else f_pu
    rocof = derivative(smooth)
    stride = max(1, int(round(spacing_s / rocof.dt)))
    half = n_points // 2
    if t_sr is None:
        i_sr = _first_rocof_extremum(rocof, dist.t_dist)
        i_min = rocof.index_at(dist.t_dist) + half * stride + 2
        i_sr = max(i_sr, i_min)
    else:
        i_sr = rocof.index_at(t_sr)
    offsets = [i * stride for i in range(-half, half + 1) if i != 0]
    if i_sr + offsets[0] < 0 or i_sr + offsets[-1] >= len(rocof):
        raise UndefinedEstimate("trace too short around t_sr for the requested neighbourhood")

    n = n_points + 1
    mat = np.zeros((n, n))
    rhs = np.full(n, dist.dp_dist)
    for k, off in enumerate(offsets):
        mat[k, 0] = 2.0 * rocof.values[i_sr + off]
        mat[k, 1 + k] = -smooth.values[i_sr + off]
    mat[n - 1, 0] = 2.0 * rocof.values[i_sr]
    mat[n - 1, 1:] = -smooth.values[i_sr] / n_points

    try:
        sol = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise UndefinedEstimate(f"singular system around t_sr: {exc}") from exc
    h = float(sol[0])
    r_mean = float(np.mean(sol[1:]))
    # Final readout per the closing formula, evaluated at t_sr with dP_LV = 0: identical
    # to the solved H by the closure row; kept as a consistency diagnostic.
    h_check = (r_mean * smooth.values[i_sr] + dist.dp_dist) / (2.0 * rocof.values[i_sr])
    return InertiaEstimate(
        method="zografos_r",
        h_est=h,
        diagnostics={
            "t_sr_s": float(rocof.t0 + i_sr * rocof.dt),
            "n_points": n_points,
            "spacing_s": stride * rocof.dt,
            "r_mean": r_mean,
            "h_closure_check": float(h_check),
        },
    )


# ---------------------------------------------------------------------------
# Tuttelberg: reduced-order identification, H from the impulse response at t=0
# ---------------------------------------------------------------------------

def _bilinear_to_continuous(a_d: np.ndarray, b_d: np.ndarray, dt: float):
    """Map a discrete model B(z)/A(z) to continuous via z = (1 + sT/2)/(1 - sT/2).

    a_d = [1, a1..an] (monic, powers of z^-1), b_d = [b1..bn].  Polynomials in z are
    A(z) = z^n + a1 z^{n-1} + ... , B(z) = b1 z^{n-1} + ... ; each z^{n-k} maps to
    (1 + sT/2)^{n-k} (1 - sT/2)^k after clearing denominators.
    """
    order = len(a_d) - 1
    plus = np.array([dt / 2.0, 1.0])    # (1 + sT/2), highest power first
    minus = np.array([-dt / 2.0, 1.0])  # (1 - sT/2)
    pow_plus = [np.array([1.0])]
    pow_minus = [np.array([1.0])]
    for _ in range(order):
        pow_plus.append(np.convolve(pow_plus[-1], plus))
        pow_minus.append(np.convolve(pow_minus[-1], minus))

    def transform(coeffs_z: np.ndarray) -> np.ndarray:
        # coeffs_z[k] multiplies z^{n-k}
        out = np.zeros(order + 1)
        for k, c in enumerate(coeffs_z):
            if c == 0.0:
                continue
            term = c * np.convolve(pow_plus[order - k], pow_minus[k])
            out[order + 1 - len(term):] += term
        return out

    den = transform(a_d)
    num = transform(np.concatenate(([0.0], b_d)))
    return num, den


def identify_reduced_model(
    dp: TimeSeries,
    df: TimeSeries,
    order: int = 3,
    sample_dt: float = 0.1,
) -> ReducedOrderModel:
    """Equation-error (ARX) least-squares fit of a strictly proper model dp -> df.

    Both series are decimated to `sample_dt` before fitting; the discrete model is
    converted to continuous form with the bilinear map.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if dp.t0 != df.t0 or dp.dt != df.dt or len(dp) != len(df):
        raise ValueError("dp and df series must be aligned")
    stride = max(1, int(round(sample_dt / dp.dt)))
    u = dp.decimate(stride).values
    y = df.decimate(stride).values
    dt_s = dp.dt * stride
    m = len(y)
    if m < 2 * order + 2:
        raise ValueError(f"series too short for order {order}: {m} samples")

    rows = m - order
    phi = np.empty((rows, 2 * order))
    for i in range(1, order + 1):
        phi[:, i - 1] = -y[order - i : m - i]
        phi[:, order + i - 1] = u[order - i : m - i]
    target = y[order:]
    rank = np.linalg.matrix_rank(phi)
    if rank < 2 * order:
        raise RankDeficientFit(
            f"regressor rank {rank} < {2 * order}: data do not identify the model"
        )
    theta, _, _, _ = np.linalg.lstsq(phi, target, rcond=None)
    resid = target - phi @ theta
    a_d = np.concatenate(([1.0], theta[:order]))
    b_d = theta[order:]
    num, den = _bilinear_to_continuous(a_d, b_d, dt_s)
    return ReducedOrderModel(
        num=num,
        den=den,
        order=order,
        fit_residual=float(np.sqrt(np.mean(resid**2))),
        sample_dt=dt_s,
    )


def estimate_tuttelberg(model: ReducedOrderModel) -> InertiaEstimate:
    """H from the identified model's unit impulse response at t = 0: H = 1/(2*|h(0+)|)."""
    h0 = model.impulse_at_zero()
    if abs(h0) < 1.0e-12:
        raise UndefinedEstimate("impulse response at t=0 is zero (b_{n-1} = 0)")
    return InertiaEstimate(
        method="tuttelberg",
        h_est=1.0 / (2.0 * abs(h0)),
        diagnostics={
            "impulse_at_zero": float(h0),
            "order": model.order,
            "fit_residual": model.fit_residual,
            "sample_dt_s": model.sample_dt,
            "num": [float(c) for c in model.num],
            "den": [float(c) for c in model.den],
        },
    )


# ---------------------------------------------------------------------------
# Virtual inertia vs wind penetration regression
# ---------------------------------------------------------------------------

def fit_virtual_inertia_relation(
    points: Sequence[tuple[float, float]],
) -> RegressionResult:
    """Zero-intercept least squares of h_v (s) against wind power integration (%)."""
    if len(points) < 2:
        raise ValueError(f"need at least 2 points, got {len(points)}")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    if np.unique(x).size < 2:
        raise ValueError("all wind-penetration values are identical")
    sxx = float(x @ x)
    if sxx == 0.0:
        raise ValueError("wind-penetration values are all zero")
    slope = float(x @ y) / sxx
    resid = y - slope * x
    ss_tot = float(y @ y)
    if ss_tot == 0.0:
        r2 = 1.0
    else:
        r2 = 1.0 - float(resid @ resid) / ss_tot
    return RegressionResult(slope_s_per_pct=slope, r_squared=r2)
