"""Matplotlib rendering of the two figure kinds.

mode-spectrum:      per-mode exponent terms vs omega/omega_1 (lin-log), solid
                    envelope curves capping the symbols, quantum-regime shading.
contrast-scaling:   -log C vs size on log-log axes, one curve per protocol,
                    top axis with the required magnetic gradient, shading where
                    the contrast drops below the threshold, slope annotations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvdata import read_csv
from .recipe import CONTRAST_SCALING, MODE_SPECTRUM, FigureRecipe

MARKERS = ["s", "x", "o"]


@dataclass
class RenderSummary:
    """What ended up in the figure; the tests assert against this."""

    kind: str
    out: str
    line_series: int
    symbol_series: int
    legend_labels: list = field(default_factory=list)
    quantum_boundary: float = None      # omega/omega_1 where hbar*omega = k_B T
    threshold_exponent: float = None    # -log C of the contrast threshold
    cap_boundary: float = None          # first capped size, if any
    slopes: dict = field(default_factory=dict)


def _fit_loglog(x, y, mask):
    keep = mask & (x > 0) & (y > 0) & np.isfinite(y)
    if np.count_nonzero(keep) < 2:
        return math.nan
    return float(np.polyfit(np.log10(x[keep]), np.log10(y[keep]), 1)[0])


def _render_mode_spectrum(recipe: FigureRecipe, table, out) -> RenderSummary:
    table.require("k", "omega_over_omega1", "quantum",
                  *[f"envelope_p{n}" for n in recipe.protocols],
                  *[f"term_p{n}" for n in recipe.protocols])
    x = table["omega_over_omega1"]
    style = recipe.style
    fig, ax = plt.subplots(figsize=style["figsize"], dpi=style["dpi"])
    labels = []
    for i, n in enumerate(recipe.protocols):
        color = style["colors"][n % len(style["colors"])]
        label = f"profile {n}"
        ax.plot(x, table[f"envelope_p{n}"], "-", color=color, lw=1.4,
                label=f"{label} envelope")
        term = table[f"term_p{n}"]
        keep = term > 0  # exactly suppressed modes cannot sit on a log axis
        ax.plot(x[keep], term[keep], MARKERS[n % len(MARKERS)], color=color,
                ms=5, ls="none", label=f"{label} modes")
        labels += [f"{label} envelope", f"{label} modes"]
    boundary = None
    if "kBTph_over_hbar_omega1" in table.metadata:
        boundary = float(table.metadata["kBTph_over_hbar_omega1"])
        ax.axvspan(boundary, max(x.max(), boundary) * 1.02,
                   color=style["quantum_color"], alpha=0.15, lw=0)
    ax.set_yscale("log")
    ax.set_xlabel(recipe.x_label or "phonon frequency  $\\omega_q/\\omega_1$")
    ax.set_ylabel(recipe.y_label or "contrast exponent per mode")
    if recipe.title:
        ax.set_title(recipe.title)
    if style["grid"]:
        ax.grid(True, which="both", alpha=0.25)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return RenderSummary(kind=recipe.kind, out=str(out),
                         line_series=len(recipe.protocols),
                         symbol_series=len(recipe.protocols),
                         legend_labels=labels, quantum_boundary=boundary)


def _gradient_axis(ax, x_nm, b_req):
    # log-log interpolation L <-> b_max keeps the top scale exact on the data
    lx, lb = np.log10(x_nm), np.log10(b_req)

    def fwd(v):
        return np.interp(np.log10(np.maximum(v, 1e-300)), lx, lb)

    def inv(v):
        return 10 ** np.interp(v, lb, lx)

    top = ax.secondary_xaxis("top", functions=(lambda v: 10 ** fwd(v),
                                               lambda v: inv(np.log10(np.maximum(v, 1e-300)))))
    top.set_xlabel("required magnetic gradient  $b_\\mathrm{max}$ [T/m]")
    return top


def _render_contrast_scaling(recipe: FigureRecipe, table, out) -> RenderSummary:
    table.require("value", "b_max_required", "capped", "quantum",
                  *[f"estimate_p{n}" for n in recipe.protocols])
    x = table["value"]
    x_nm = x * 1e9
    unflagged = (table["capped"] == 0) & (table["quantum"] == 0)
    style = recipe.style
    fig, ax = plt.subplots(figsize=style["figsize"], dpi=style["dpi"])
    labels, slopes = [], {}
    symbol_series = 0
    for n in recipe.protocols:
        color = style["colors"][n % len(style["colors"])]
        est = table[f"estimate_p{n}"]
        slope = _fit_loglog(x, est, unflagged)
        slopes[n] = slope
        label = f"profile {n}"
        if recipe.annotate_slopes and math.isfinite(slope):
            label += f"  ($\\propto L^{{{slope:.2f}}}$)"
        ax.plot(x_nm, est, "-", color=color, lw=1.5, label=label)
        labels.append(label)
        exact_col = f"minus_log_C_p{n}"
        if recipe.show_exact and exact_col in table:
            vals = table[exact_col]
            keep = vals > 0
            ax.plot(x_nm[keep], vals[keep], MARKERS[n % len(MARKERS)], color=color,
                    ms=4, ls="none")
            symbol_series += 1
    thr = -math.log(recipe.threshold)
    lo = min(v[v > 0].min() for v in
             (table[f"estimate_p{n}"] for n in recipe.protocols))
    hi = max(max(table[f"estimate_p{n}"].max() for n in recipe.protocols), thr * 10)
    ax.axhspan(thr, hi * 10, color=style["shade_color"], zorder=0)
    cap_boundary = None
    if np.any(table["capped"] > 0):
        first = np.argmax(table["capped"] > 0)
        cap_boundary = float(x[first])
        ax.axvspan(x_nm[first], x_nm[-1] * 1.02, color=style["shade_color"],
                   alpha=0.6, zorder=0)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_ylim(lo / 10, hi * 10)
    ax.set_xlabel(recipe.x_label or "object size $L$ [nm]")
    ax.set_ylabel(recipe.y_label or "$-\\log\\,C_\\mathrm{ph}$")
    if recipe.title:
        ax.set_title(recipe.title)
    _gradient_axis(ax, x_nm, table["b_max_required"])
    if style["grid"]:
        ax.grid(True, which="both", alpha=0.25)
    ax.legend(fontsize=8, loc="lower right")
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return RenderSummary(kind=recipe.kind, out=str(out),
                         line_series=len(recipe.protocols),
                         symbol_series=symbol_series, legend_labels=labels,
                         threshold_exponent=thr, cap_boundary=cap_boundary,
                         slopes=slopes)


def render(recipe: FigureRecipe, out) -> RenderSummary:
    """Render one figure; reads the CSV, never writes anything but `out`.

    Raises before any file is produced when the CSV is empty or lacks the
    columns the figure kind needs.
    """
    table = read_csv(recipe.csv)
    if recipe.kind == MODE_SPECTRUM:
        return _render_mode_spectrum(recipe, table, out)
    if recipe.kind == CONTRAST_SCALING:
        return _render_contrast_scaling(recipe, table, out)
    raise ValueError(f"unknown figure kind {recipe.kind!r}")
