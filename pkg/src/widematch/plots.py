"""Deterministic SVG figures from a bundle directory's CSV tables."""

from __future__ import annotations

import csv
import os
from collections import OrderedDict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["emit_plots", "read_table"]

MARGIN = 0.05
_RC = {"svg.hashsalt": "widematch", "svg.fonttype": "path", "path.simplify": False}


def read_table(path: str) -> "OrderedDict[str, tuple[np.ndarray, np.ndarray]]":
    """Series of a three-column CSV keyed by the strategy column."""
    series: OrderedDict[str, tuple[list, list]] = OrderedDict()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for x, name, y in reader:
            xs, ys = series.setdefault(name, ([], []))
            xs.append(float(x))
            ys.append(float(y))
    return OrderedDict((k, (np.array(v[0]), np.array(v[1]))) for k, v in series.items())


def _limits(lo: float, hi: float) -> tuple[float, float]:
    span = hi - lo if hi > lo else max(abs(hi), 1.0)
    return lo - MARGIN * span, hi + MARGIN * span


def _figure(series, xlabel: str, ylabel: str, xscale: float, yscale: float, path: str,
            xrange=None, marker=None) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        x_all, y_all = [], []
        for name, (x, y) in series.items():
            ax.plot(x / xscale, y / yscale, label=name, marker=marker, linewidth=1.2)
            x_all.append(x)
            y_all.append(y)
        xs = np.concatenate(x_all) / xscale
        ys = np.concatenate(y_all) / yscale
        lo, hi = (xrange[0] / xscale, xrange[1] / xscale) if xrange else (xs.min(), xs.max())
        ax.set_xlim(*_limits(lo, hi))
        ax.set_ylim(*_limits(float(np.min(ys)), float(np.max(ys))))
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, linewidth=0.4)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)


def emit_plots(bundle_dir: str) -> list[str]:
    """Render every figure the bundle has data for.

    Returns
    -------
    list of str
        Written file paths.  Re-running on the same bundle yields
        byte-identical files.
    """
    written = []
    tr = os.path.join(bundle_dir, "transmission.csv")
    if os.path.exists(tr):
        series = read_table(tr)
        out = os.path.join(bundle_dir, "transmission.svg")
        _figure(series, "frequency (GHz)", "transmission T(f)", 1e9, 1.0, out)
        written.append(out)
    sn = os.path.join(bundle_dir, "snr.csv")
    if os.path.exists(sn):
        series = read_table(sn)
        out = os.path.join(bundle_dir, "snr.svg")
        _figure(series, "frequency (GHz)", "SNR(f) T(f)", 1e9, 1.0, out)
        written.append(out)
    sw = os.path.join(bundle_dir, "sweep.csv")
    if os.path.exists(sw):
        series = read_table(sw)
        out = os.path.join(bundle_dir, "sweep.svg")
        _figure(series, "bandwidth (GHz)", "rate (Gbit/s)", 1e9, 1e9, out, marker="o")
        written.append(out)
    return written
