"""Line/scatter charts written as self-contained SVG files."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


@dataclass(frozen=True)
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]


@dataclass(frozen=True)
class Axes:
    xlabel: str
    ylabel: str
    title: str = ""
    logy: bool = False


def emit_svg(series: Sequence[Series], axes: Axes, path) -> None:
    """Render ``series`` as polylines (single points as markers) into ``path``."""
    if not series or not any(len(s.x) for s in series):
        raise ValueError("nothing to plot: empty series")
    # fixed ids and no timestamp keep the output byte-identical between runs
    with plt.rc_context({"svg.hashsalt": "steklov-shell", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.4))
        for s in series:
            x = [float(v) for v in s.x]
            y = [float(v) for v in s.y]
            if axes.logy:
                pairs = [(a, b) for a, b in zip(x, y) if b > 0]
                x, y = [a for a, _ in pairs], [b for _, b in pairs]
            style = "o" if len(x) == 1 else "o-"
            ax.plot(x, y, style, markersize=3, linewidth=1.2, label=s.label or None)
        if axes.logy:
            ax.set_yscale("log")
        ax.set_xlabel(axes.xlabel)
        ax.set_ylabel(axes.ylabel)
        if axes.title:
            ax.set_title(axes.title)
        if len(series) > 1 or series[0].label:
            ax.legend(fontsize="small")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
