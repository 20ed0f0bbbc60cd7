"""Build log-log logical-error-rate figures from sweep CSV files.

The input is the CSV emitted by the simulator's sweep command; this
package reads those files by column name only, so any producer that
writes the same schema works. Each figure kind turns the rows into
one curve per group, drawn on log-log axes with Wilson-interval error
bars and a fitted log-log slope in the legend label.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CSV_COLUMNS = (
    "arch", "model", "d", "rounds", "p_s", "p_s_1q", "p_M", "sigma_uG",
    "trials", "failures_x", "failures_z", "failures", "p_L", "ci_lo",
    "ci_hi", "seed",
)

FIGURE_KINDS = ("distance-comparison", "scheme-comparison")

# Field-noise amplitudes get fixed colors so panels are comparable
# across figures; curves without an amplitude cycle through neutrals.
SIGMA_COLORS = {100.0: "red", 32.0: "green", 10.0: "blue", 1.0: "purple"}
FALLBACK_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:purple",
                   "tab:brown", "tab:cyan", "tab:olive", "tab:pink")

# The all-field-sensitive system draws solid, the mixed one dashed, and
# the field-insensitive system is always a single solid black curve.
ARCH_LINESTYLES = {"zeeman": "-", "mixed": "--", "hyperfine": "-"}


@dataclass(frozen=True)
class SweepRow:
    arch: str
    model: str
    d: int
    p_s: float
    p_M: float
    sigma_uG: float | None
    p_L: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple[str, ...]
    kind: str
    out_path: str
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {', '.join(FIGURE_KINDS)}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def read_sweep_rows(path: str) -> list[SweepRow]:
    """Read one sweep CSV, checking the schema by column name."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or ()
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise ValueError(
                f"{path}: missing columns: {', '.join(missing)}")
        rows = []
        for raw in reader:
            sigma = raw["sigma_uG"]
            rows.append(SweepRow(
                arch=raw["arch"],
                model=raw["model"],
                d=int(raw["d"]),
                p_s=float(raw["p_s"]),
                p_M=float(raw["p_M"]),
                sigma_uG=None if sigma == "" else float(sigma),
                p_L=float(raw["p_L"]),
                ci_lo=float(raw["ci_lo"]),
                ci_hi=float(raw["ci_hi"]),
            ))
    return rows


def fitted_slope(rows: list[SweepRow]) -> float | None:
    """Least-squares log-log slope of p_L against p_s.

    Only points in the scattering-dominated regime (p_s at least ten
    times the per-gate dephasing rate) enter the fit, and zero-failure
    points carry no slope information; fewer than two usable points
    means no annotation.
    """
    usable = [r for r in rows if r.p_L > 0.0 and r.p_s >= 10.0 * r.p_M]
    if len(usable) < 2:
        return None
    xs = np.log([r.p_s for r in usable])
    ys = np.log([r.p_L for r in usable])
    return float(np.polyfit(xs, ys, 1)[0])


def _dedupe_rates(rows: list[SweepRow]) -> list[SweepRow]:
    seen = set()
    out = []
    for r in rows:
        if r.p_s not in seen:
            seen.add(r.p_s)
            out.append(r)
    return out


def _group_rows(rows, kind):
    """Split rows into curves: list of (label, rows) in stable order."""
    groups: dict[tuple, list[SweepRow]] = {}
    order = []
    for r in rows:
        if kind == "scheme-comparison" and r.arch == "hyperfine":
            # The field-insensitive system does not depend on the
            # field-noise amplitude, so its curves collapse into one.
            key = (r.arch, r.model, r.d, None)
        else:
            key = (r.arch, r.model, r.d, r.sigma_uG)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)
    curves = []
    for key in order:
        arch, model, d, sigma = key
        members = groups[key]
        if kind == "scheme-comparison" and arch == "hyperfine":
            members = _dedupe_rates(members)
        if kind == "distance-comparison":
            label = f"{arch} d={d}"
        elif sigma is not None:
            label = f"{arch} {sigma:g} uG"
        else:
            label = arch
        curves.append((arch, sigma, label, members))
    return curves


def render(spec: FigureSpec):
    """Draw the figure described by spec and write it to spec.out_path.

    Returns the matplotlib Figure so callers and tests can inspect the
    curves; the output depends only on the CSV content and the given
    FigureSpec.
    """
    rows = [r for path in spec.inputs for r in read_sweep_rows(path)]
    fallback = itertools.cycle(FALLBACK_COLORS)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for arch, sigma, label, members in _group_rows(rows, spec.kind):
        members = sorted(members, key=lambda r: r.p_s)
        slope = fitted_slope(members)
        if slope is not None:
            label = f"{label} (slope {slope:.2f})"
        if arch == "hyperfine":
            color = "black"
        elif sigma in SIGMA_COLORS:
            color = SIGMA_COLORS[sigma]
        else:
            color = next(fallback)
        style = ARCH_LINESTYLES.get(arch, "-")
        plotted = [r for r in members if r.p_L > 0.0]
        xs = np.array([r.p_s for r in plotted])
        ys = np.array([r.p_L for r in plotted])
        yerr = np.array([[max(r.p_L - r.ci_lo, 0.0) for r in plotted],
                         [max(r.ci_hi - r.p_L, 0.0) for r in plotted]])
        ax.errorbar(xs, ys, yerr=yerr, label=label, color=color,
                    linestyle=style, marker="o", markersize=3.5,
                    capsize=2.5, linewidth=1.4)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("scattering rate per two-qubit gate")
    ax.set_ylabel("logical error rate")
    ax.grid(True, which="both", alpha=0.3)
    if spec.xlim is not None:
        ax.set_xlim(spec.xlim)
    if spec.ylim is not None:
        ax.set_ylim(spec.ylim)
    if ax.containers:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=150)
    return fig
