"""Static SVG figures for density reports and direction sweeps.

Output is deterministic: no timestamps in the metadata and a fixed hash
salt for the element ids matplotlib generates.
"""

from __future__ import annotations

import io
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .logmeasure import DensityReport, IntervalMeasureTable  # noqa: E402

STYLE = {
    "svg.hashsalt": "expwidth",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
}


def _svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def block_estimate_figure(report: DensityReport, title: str = "") -> str:
    """a -> (1/ln a) * limsup estimate of L(r, ar), with the four variants marked."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 3.6))
        a = np.asarray(report.block_factors)
        est = np.asarray(report.block_estimates)
        if a.size:
            ax.plot(a, est, marker=".", color="black", label="block estimate")
        lo, hi = report.window
        if math.isfinite(lo) and math.isfinite(hi):
            ax.axvspan(lo, hi, color="tab:blue", alpha=0.08, label="upper window")
        for (name, value), color in zip(report.variants().items(),
                                        ("tab:blue", "tab:orange", "tab:green", "tab:red")):
            ax.axhline(value, color=color, linestyle="--", linewidth=0.8, label=f"{name} = {value:.5g}")
        ax.set_xscale("log")
        ax.set_xlabel("block factor a")
        ax.set_ylabel("limsup L(r, ar) / ln a")
        if title:
            ax.set_title(title)
        ax.legend(fontsize=7, frameon=False)
        fig.tight_layout()
        return _svg(fig)


def interval_curves_figure(table: IntervalMeasureTable, factors=(2.0, 10.0, 100.0), title: str = "") -> str:
    """r -> L(r, ar) / ln a for a few block factors a on the grid."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 3.6))
        q = table.ratio
        for a in factors:
            k = int(round(math.log(a) / math.log(q))) if q else 0
            if k < 1 or k >= table.size:
                continue
            i = np.arange(table.size - k)
            vals = table.values[i, i + k] / (k * math.log(q))
            ax.plot(table.grid[i], vals, label=f"a = {q ** k:.3g}")
        ax.set_xscale("log")
        ax.set_xlabel("r")
        ax.set_ylabel("L(r, ar) / ln a")
        if title:
            ax.set_title(title)
        ax.legend(fontsize=7, frameon=False)
        fig.tight_layout()
        return _svg(fig)


def direction_figure(thetas, estimates, converged, title: str = "") -> str:
    """theta -> 2 pi ln-dens(e^{i theta} Z); unconverged directions drawn hollow."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 3.6))
        thetas = np.asarray(thetas)
        widths = 2 * math.pi * np.asarray(estimates)
        ok = np.asarray(converged, dtype=bool)
        ax.plot(thetas, widths, color="black", linewidth=0.8)
        ax.plot(thetas[~ok], widths[~ok], linestyle="none", marker="o", mfc="none",
                color="tab:red", markersize=3, label="not converged")
        ax.set_xlabel("theta")
        ax.set_ylabel("2 pi ln-dens(e^{i theta} Z)")
        ax.set_xlim(0, math.pi)
        if title:
            ax.set_title(title)
        if (~ok).any():
            ax.legend(fontsize=7, frameon=False)
        fig.tight_layout()
        return _svg(fig)
