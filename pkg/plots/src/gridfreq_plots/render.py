"""Render figures from gridfreq sweep CSVs.

Pure consumer of the sweep's file contract: estimated-inertia bar comparisons,
ROCOF traces, the sliding-window inertia panels and the virtual-inertia regression.
Rendering is deterministic: fixed style, no timestamps, same bytes for same inputs.

Usage:
    gridfreq-plots --kind h-comparison --in sweep/sweep.csv sweep/regression.csv \
                   --out h_comparison.png
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("h-comparison", "rocof-traces", "wall-panels", "regression")

METHOD_ORDER = ("inoue", "chassin", "wall", "zografos17", "tuttelberg", "zografos_r")
METHOD_LABELS = {
    "inoue": "Inoue",
    "chassin": "Chassin",
    "wall": "Wall",
    "zografos17": "Zografos '17",
    "tuttelberg": "Tuttelberg",
    "zografos_r": "Zografos R",
}
SCENARIO_COLORS = {1: "#4c72b0", 2: "#dd8452", 3: "#55a868", 4: "#c44e52"}


class PlotDataError(ValueError):
    """Input CSV does not match the expected schema."""


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    dpi: int = 150
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotDataError(f"unknown figure kind {self.kind!r} (choose from {KINDS})")
        if not self.inputs:
            raise PlotDataError("at least one input CSV is required")


def _read_csv(path: str | Path, required: tuple[str, ...]) -> dict[str, list[str]]:
    path = Path(path)
    if not path.exists():
        raise PlotDataError(f"{path}: input file does not exist")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise PlotDataError(f"{path}: missing column {col!r}")
        rows = list(reader)
    return {col: [row[col] for row in rows] for col in header}


def _floats(table, col):
    return np.array([float(v) for v in table[col]])


def _find_input(inputs, required):
    """First input CSV carrying all required columns; else a schema error naming them."""
    last_error = None
    for path in inputs:
        try:
            return path, _read_csv(path, required)
        except PlotDataError as exc:
            last_error = exc
    raise last_error


def render(spec: PlotSpec) -> Path:
    """Render the figure described by spec and return the output path."""
    fig = {
        "h-comparison": _render_h_comparison,
        "rocof-traces": _render_rocof_traces,
        "wall-panels": _render_wall_panels,
        "regression": _render_regression,
    }[spec.kind](spec)
    out = Path(spec.output)
    fig.savefig(out, dpi=spec.dpi)
    plt.close(fig)
    return out


def _render_h_comparison(spec):
    _, table = _find_input(
        spec.inputs,
        ("scenario", "wind_control", "h_rotational_s", "method", "h_est_s"),
    )
    h_v_wt = None
    for path in spec.inputs:
        try:
            _, reg = _find_input((path,), ("wpi_pct", "slope_s_per_pct"))
            if reg["slope_s_per_pct"]:
                h_v_wt = float(reg["slope_s_per_pct"][0]) * 100.0
        except PlotDataError:
            continue

    scenarios = sorted({int(s) for s in table["scenario"]})
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.2), sharey=True)
    for ax, control, title in (
        (axes[0], "off", "without wind frequency control"),
        (axes[1], "on", "with wind frequency control"),
    ):
        width = 0.8 / len(METHOD_ORDER)
        for j, method in enumerate(METHOD_ORDER):
            xs, ys = [], []
            for i, scen in enumerate(table["scenario"]):
                if table["wind_control"][i] != control or table["method"][i] != method:
                    continue
                if not table["h_est_s"][i]:
                    continue
                xs.append(scenarios.index(int(scen)) + (j - 2.5) * width)
                ys.append(float(table["h_est_s"][i]))
            ax.bar(xs, ys, width=width * 0.9, label=METHOD_LABELS[method])
        # ground-truth overlays: rotational always, combined when the regression is known
        for i_s, scen in enumerate(scenarios):
            rows = [
                k for k, s in enumerate(table["scenario"])
                if int(s) == scen and table["wind_control"][k] == control
            ]
            if not rows:
                continue
            h_rot = float(table["h_rotational_s"][rows[0]])
            ax.hlines(h_rot, i_s - 0.45, i_s + 0.45, colors="black", lw=1.4)
            if control == "on" and h_v_wt is not None:
                wpi = float(table["wpi_pct"][rows[0]]) if "wpi_pct" in table else 0.0
                ax.hlines(h_rot + h_v_wt * wpi / 100.0, i_s - 0.45, i_s + 0.45,
                          colors="black", lw=1.2, linestyles="--")
        ax.set_xticks(range(len(scenarios)))
        ax.set_xticklabels([f"scenario {s}" for s in scenarios])
        ax.set_title(title)
        ax.grid(axis="y", alpha=0.3)
    axes[0].set_ylabel("estimated H (s)")
    axes[1].legend(fontsize=8, ncol=2)
    fig.tight_layout()
    return fig


def _render_rocof_traces(spec):
    _, table = _find_input(spec.inputs, ("scenario", "wind_control", "t_s", "rocof_mhz_s"))
    fig, axes = plt.subplots(2, 1, figsize=(8, 6.4), sharex=True, sharey=True)
    for ax, control, title in (
        (axes[0], "off", "without wind frequency control"),
        (axes[1], "on", "with wind frequency control"),
    ):
        for scen in sorted({int(s) for s in table["scenario"]}):
            sel = [
                i for i in range(len(table["t_s"]))
                if int(table["scenario"][i]) == scen and table["wind_control"][i] == control
            ]
            if not sel:
                continue
            t = np.array([float(table["t_s"][i]) for i in sel])
            r = np.array([float(table["rocof_mhz_s"][i]) for i in sel])
            ax.plot(t, r, label=f"scenario {scen}",
                    color=SCENARIO_COLORS.get(scen), lw=1.2)
        ax.set_title(title)
        ax.set_ylabel("ROCOF (mHz/s)")
        ax.grid(alpha=0.3)
    axes[0].legend(fontsize=8)
    axes[1].set_xlabel("time (s)")
    fig.tight_layout()
    return fig


def _render_wall_panels(spec):
    _, table = _find_input(
        spec.inputs, ("wind_control", "t_s", "h_wall_s", "p_total_pu", "rocof_mhz_s")
    )
    fig, axes = plt.subplots(3, 1, figsize=(8, 8.2), sharex=True)
    for control, color, label in (("off", "#4c72b0", "control off"),
                                  ("on", "#c44e52", "control on")):
        sel = [i for i in range(len(table["t_s"])) if table["wind_control"][i] == control]
        if not sel:
            continue
        t = np.array([float(table["t_s"][i]) for i in sel])
        h = np.array([float(table["h_wall_s"][i]) for i in sel])
        p = np.array([float(table["p_total_pu"][i]) for i in sel])
        r = np.array([float(table["rocof_mhz_s"][i]) for i in sel])
        axes[0].plot(t, h, color=color, label=label, lw=1.3)
        axes[1].plot(t, p, color=color, lw=1.3)
        axes[2].plot(t, r, color=color, lw=1.3)
    axes[0].set_ylabel("estimated H(t) (s)")
    axes[0].legend(fontsize=8)
    axes[1].set_ylabel("total power variation (pu)")
    axes[2].set_ylabel("ROCOF (mHz/s)")
    axes[2].set_xlabel("time (s)")
    for ax in axes:
        ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def _render_regression(spec):
    path, table = _find_input(
        spec.inputs,
        ("wpi_pct", "h_v_eq_s", "slope_s_per_pct", "slope_text", "r_squared_text"),
    )
    if not table["wpi_pct"]:
        raise PlotDataError(f"{path}: regression table is empty (was the sweep degenerate?)")
    wpi = _floats(table, "wpi_pct")
    h_v = _floats(table, "h_v_eq_s")
    slope = float(table["slope_s_per_pct"][0])
    slope_text = table["slope_text"][0]
    r2_text = table["r_squared_text"][0]

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    grid = np.linspace(0.0, max(wpi) * 1.1, 50)
    ax.plot(grid, slope * grid, color="#4c72b0", lw=1.4,
            label=f"H_V,eq = {slope_text} * WPI")
    ax.scatter(wpi, h_v, color="#c44e52", zorder=3, label="measured")
    ax.annotate(
        f"slope = {slope_text} s/%\nR^2 = {r2_text}",
        xy=(0.05, 0.82), xycoords="axes fraction", fontsize=10,
        bbox={"boxstyle": "round", "facecolor": "white", "edgecolor": "#888888"},
    )
    ax.set_xlabel("wind power integration (%)")
    ax.set_ylabel("virtual inertia H_V,eq (s)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=9, loc="lower right")
    fig.tight_layout()
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gridfreq-plots", description=__doc__)
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="inputs", required=True, nargs="+",
                        help="input CSV file(s) from a gridfreq sweep")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    try:
        out = render(PlotSpec(kind=args.kind, inputs=tuple(args.inputs),
                              output=args.out, dpi=args.dpi))
    except PlotDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
